// DOM construction and rendering. Rendering copies session state into the
// page verbatim: polyline points, distances, and marker pixels are the
// server's numbers stringified, never recomputed.

import type { CanvasSession, ToolMode } from "./session";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface StudioEls {
  root: HTMLElement;
  modeButtons: Record<ToolMode, HTMLButtonElement>;
  heightValue: HTMLInputElement;
  clearBtn: HTMLButtonElement;
  submitBtn: HTMLButtonElement;
  compareBtn: HTMLButtonElement;
  kInput: HTMLInputElement;
  canvasWrap: HTMLElement;
  sceneImg: HTMLImageElement;
  sketchOverlay: HTMLImageElement;
  overlaySvg: SVGSVGElement;
  banner: HTMLElement;
  bannerText: HTMLElement;
  retryBtn: HTMLButtonElement;
  notice: HTMLElement;
  eventsList: HTMLElement;
  resultsList: HTMLElement;
  roundtrip: HTMLElement;
  planRows: HTMLElement;
  addRowBtn: HTMLButtonElement;
}

export function buildSkeleton(root: HTMLElement): StudioEls {
  root.innerHTML = `
    <div class="toolbar">
      <button id="mode-draw">Draw</button>
      <button id="mode-close">Close marker</button>
      <button id="mode-open">Open marker</button>
      <button id="mode-height">Height</button>
      <label>height <input id="height-value" type="number" step="0.05" value="0.5"></label>
      <button id="clear-btn">Clear stroke</button>
      <button id="submit-btn">Submit sketch</button>
      <label>k <input id="k-input" type="number" min="1" value="10"></label>
      <button id="compare-btn">Compare</button>
    </div>
    <div id="banner" hidden>
      <span id="banner-text"></span>
      <button id="retry-btn" hidden>Retry</button>
    </div>
    <div id="canvas-wrap" style="position:relative">
      <img id="scene-img" alt="scene" style="display:block">
      <img id="sketch-overlay" alt="sketch" hidden
           style="position:absolute;left:0;top:0;mix-blend-mode:screen">
      <svg id="overlay-svg" style="position:absolute;left:0;top:0"></svg>
    </div>
    <div id="notice" hidden></div>
    <div class="panel">
      <h3>Detected markers</h3>
      <ul id="events-list"></ul>
      <h3>Nearest training motions</h3>
      <ul id="results-list"></ul>
      <div id="roundtrip"></div>
    </div>
    <div class="panel">
      <h3>Waypoint plan</h3>
      <table><tbody id="plan-rows"></tbody></table>
      <button id="add-row-btn">Add waypoint</button>
    </div>
  `;
  const get = <T extends Element>(id: string) => root.querySelector(`#${id}`) as T;
  return {
    root,
    modeButtons: {
      draw: get<HTMLButtonElement>("mode-draw"),
      close: get<HTMLButtonElement>("mode-close"),
      open: get<HTMLButtonElement>("mode-open"),
      height: get<HTMLButtonElement>("mode-height"),
    },
    heightValue: get<HTMLInputElement>("height-value"),
    clearBtn: get<HTMLButtonElement>("clear-btn"),
    submitBtn: get<HTMLButtonElement>("submit-btn"),
    compareBtn: get<HTMLButtonElement>("compare-btn"),
    kInput: get<HTMLInputElement>("k-input"),
    canvasWrap: get<HTMLElement>("canvas-wrap"),
    sceneImg: get<HTMLImageElement>("scene-img"),
    sketchOverlay: get<HTMLImageElement>("sketch-overlay"),
    overlaySvg: get<SVGSVGElement>("overlay-svg"),
    banner: get<HTMLElement>("banner"),
    bannerText: get<HTMLElement>("banner-text"),
    retryBtn: get<HTMLButtonElement>("retry-btn"),
    notice: get<HTMLElement>("notice"),
    eventsList: get<HTMLElement>("events-list"),
    resultsList: get<HTMLElement>("results-list"),
    roundtrip: get<HTMLElement>("roundtrip"),
    planRows: get<HTMLElement>("plan-rows"),
    addRowBtn: get<HTMLButtonElement>("add-row-btn"),
  };
}

export function addPlanRowEls(els: StudioEls): void {
  const row = document.createElement("tr");
  row.className = "plan-row";
  row.innerHTML = `
    <td><input class="plan-x" type="number" step="0.05" value="0"></td>
    <td><input class="plan-y" type="number" step="0.05" value="0"></td>
    <td><input class="plan-z" type="number" step="0.05" value="0.5"></td>
    <td><select class="plan-gripper">
      <option value="">-</option>
      <option value="close">close</option>
      <option value="open">open</option>
    </select></td>
  `;
  els.planRows.appendChild(row);
}

function points(pixels: [number, number][]): string {
  return pixels.map((p) => `${p[0]},${p[1]}`).join(" ");
}

function polyline(cls: string, stroke: string, pixels: [number, number][]): SVGElement {
  const el = document.createElementNS(SVG_NS, "polyline");
  el.setAttribute("class", cls);
  el.setAttribute("points", points(pixels));
  el.setAttribute("fill", "none");
  el.setAttribute("stroke", stroke);
  el.setAttribute("stroke-width", "2");
  return el;
}

function renderSvg(session: CanvasSession, els: StudioEls): void {
  const svg = els.overlaySvg;
  while (svg.firstChild) svg.removeChild(svg.firstChild);

  // Draw order: training motions under the executed path, live stroke on top.
  for (const overlay of session.overlays.similar) {
    svg.appendChild(polyline("similar", "purple", overlay.pixels));
  }
  if (session.overlays.executed) {
    svg.appendChild(polyline("executed", "red", session.overlays.executed.pixels));
  }
  if (session.samples.length >= 2) {
    svg.appendChild(polyline("stroke-preview", "orange", session.samples));
  }
  for (const click of session.markerClicks) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("class", `marker-click ${click.kind}`);
    dot.setAttribute("cx", String(click.pixel[0]));
    dot.setAttribute("cy", String(click.pixel[1]));
    dot.setAttribute("r", "4");
    dot.setAttribute("fill", click.kind === "close" ? "green" : "blue");
    svg.appendChild(dot);
  }
  for (const note of session.heightAnnotations) {
    const tick = document.createElementNS(SVG_NS, "circle");
    tick.setAttribute("class", "height-note");
    tick.setAttribute("cx", String(note.pixel[0]));
    tick.setAttribute("cy", String(note.pixel[1]));
    tick.setAttribute("r", "3");
    tick.setAttribute("fill", "none");
    tick.setAttribute("stroke", "white");
    svg.appendChild(tick);
  }
}

export function render(session: CanvasSession, els: StudioEls): void {
  const scene = session.scene;
  if (scene) {
    const { width, height } = scene.camera;
    // Fix the stack to camera pixels so pointer coordinates map one-to-one.
    els.canvasWrap.style.width = `${width}px`;
    els.canvasWrap.style.height = `${height}px`;
    if (!els.sceneImg.getAttribute("src")) {
      els.sceneImg.src = `data:image/png;base64,${scene.image_b64}`;
      els.sceneImg.width = width;
      els.sceneImg.height = height;
    }
    els.overlaySvg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    els.overlaySvg.setAttribute("width", String(width));
    els.overlaySvg.setAttribute("height", String(height));
  }

  for (const [mode, btn] of Object.entries(els.modeButtons)) {
    btn.classList.toggle("active", session.mode === mode);
  }
  els.submitBtn.disabled = !session.canSubmit;
  els.compareBtn.disabled = !session.canCompare;
  els.clearBtn.disabled = !session.canEdit;

  const png = session.overlays.sketchPng;
  els.sketchOverlay.hidden = png === null;
  if (png !== null) {
    els.sketchOverlay.src = `data:image/png;base64,${png}`;
  } else {
    els.sketchOverlay.removeAttribute("src");
  }

  renderSvg(session, els);

  els.eventsList.innerHTML = "";
  for (const ev of session.overlays.events) {
    const li = document.createElement("li");
    li.className = `event ${ev.kind}`;
    li.textContent = `${ev.kind} at step ${ev.step}, pixel (${ev.pixel[0]}, ${ev.pixel[1]})`;
    els.eventsList.appendChild(li);
  }

  els.resultsList.innerHTML = "";
  for (const overlay of session.overlays.similar) {
    const li = document.createElement("li");
    li.className = "result";
    const r = overlay.result;
    li.textContent = `${r.episode_id} [${r.skill}] distance ${r.distance}`;
    els.resultsList.appendChild(li);
  }

  const executed = session.overlays.executed;
  els.roundtrip.textContent =
    executed === null ? "" : `roundtrip error ${executed.roundtripError}`;

  els.notice.hidden = session.overlays.notice === null;
  els.notice.textContent = session.overlays.notice ?? "";

  els.banner.hidden = session.banner === null;
  if (session.banner) {
    els.bannerText.textContent = `${session.banner.code}: ${session.banner.message}`;
    els.retryBtn.hidden = !session.banner.retryable;
  }
}
