// Studio wiring: pointer input, the submit and compare request chains, and
// error banners. Action chains are tracked on `pending` so scripted sessions
// can await quiescence.

import { ApiError, StudioApi } from "./api";
import { CanvasSession, SimilarOverlay, ToolMode } from "./session";
import type { MarkerKind, PlanRow, RolloutResponse, SimilarityResult } from "./types";
import { addPlanRowEls, buildSkeleton, render, StudioEls } from "./view";

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export class StudioApp {
  readonly session: CanvasSession;
  readonly els: StudioEls;
  pending: Promise<void> | null = null;

  private readonly api: StudioApi;
  private drawing = false;
  private lastFailed: (() => Promise<void>) | null = null;

  constructor(root: HTMLElement, api: StudioApi) {
    this.api = api;
    this.session = new CanvasSession();
    this.els = buildSkeleton(root);
    this.bind();
    render(this.session, this.els);
  }

  // Resolves once every in-flight action chain has finished.
  async settle(): Promise<void> {
    while (this.pending) await this.pending;
  }

  loadScene(sceneId: string): Promise<void> {
    return this.track(this.runLoadScene(sceneId));
  }

  submit(): Promise<void> {
    if (!this.session.canSubmit) return Promise.resolve();
    return this.track(this.runSubmit());
  }

  compare(): Promise<void> {
    if (!this.session.canCompare) return Promise.resolve();
    return this.track(this.runCompare());
  }

  retry(): Promise<void> {
    const action = this.lastFailed;
    this.lastFailed = null;
    this.session.banner = null;
    render(this.session, this.els);
    return action ? action() : Promise.resolve();
  }

  addPlanRow(): void {
    addPlanRowEls(this.els);
    this.syncInputs();
  }

  private track(p: Promise<void>): Promise<void> {
    const tracked = p.finally(() => {
      if (this.pending === tracked) this.pending = null;
    });
    this.pending = tracked;
    return tracked;
  }

  private async runLoadScene(sceneId: string): Promise<void> {
    this.session.banner = null;
    try {
      const scene = await this.api.getScene(sceneId);
      this.session.scene = scene;
      this.session.sceneId = scene.scene_id;
      this.lastFailed = null;
    } catch (err) {
      this.fail(err, () => this.loadScene(sceneId));
    }
    render(this.session, this.els);
  }

  private async runSubmit(): Promise<void> {
    const session = this.session;
    session.inflight.submit = true;
    session.banner = null;
    render(session, this.els);
    let ok = false;
    try {
      const reply = await this.api.rasterize(session.strokePayload());
      session.overlays.sketchPng = reply.png_b64;
      session.overlays.events = reply.events;
      this.lastFailed = null;
      ok = true;
    } catch (err) {
      this.fail(err, () => this.submit());
    } finally {
      session.inflight.submit = false;
      render(session, this.els);
    }
    // One user action covers the whole iteration loop: once the sketch is
    // accepted and a plan is ready, run the comparison as well.
    if (ok && session.plan.length >= 2) {
      await this.runCompare();
    }
  }

  private async runCompare(): Promise<void> {
    const session = this.session;
    if (session.plan.length < 2 || session.inflight.compare) return;
    session.inflight.compare = true;
    session.banner = null;
    render(session, this.els);
    try {
      const sceneId = session.sceneId ?? undefined;
      let rollout: RolloutResponse;
      try {
        rollout = await this.api.rollout(session.plan, "studio-rollout", sceneId);
      } catch (err) {
        this.fail(err, () => this.compare());
        return;
      }
      const overlays = session.overlays;
      overlays.executed = {
        pixels: rollout.pixels ?? [],
        roundtripError: rollout.roundtrip_error,
      };

      const notices: string[] = [];
      let results: SimilarityResult[] = [];
      try {
        // The query trajectory is the executed rollout, forwarded verbatim.
        const waypoints = rollout.episode.steps.map((s) => [s.px, s.py, s.pz]);
        results = (await this.api.query(waypoints, session.k)).results;
      } catch (err) {
        notices.push(`similarity query failed (${describe(err)})`);
      }
      const fetched = await Promise.allSettled(
        results.map((r) => this.api.getEpisode(r.episode_id, sceneId)),
      );
      const similar: SimilarOverlay[] = [];
      let missing = 0;
      fetched.forEach((f, i) => {
        if (f.status === "fulfilled") {
          similar.push({ result: results[i], pixels: f.value.pixels ?? [] });
        } else {
          missing += 1;
        }
      });
      if (missing > 0) notices.push(`${missing} similar trajectories unavailable`);
      overlays.similar = similar;
      overlays.notice = notices.length > 0 ? notices.join("; ") : null;
      this.lastFailed = null;
    } finally {
      session.inflight.compare = false;
      render(session, this.els);
    }
  }

  private fail(err: unknown, retryAction: () => Promise<void>): void {
    const e =
      err instanceof ApiError ? err : new ApiError("unknown", describe(err), 0, true);
    this.session.banner = { code: e.code, message: e.message, retryable: e.retryable };
    this.lastFailed = e.retryable ? retryAction : null;
  }

  private pointerPixel(e: MouseEvent): [number, number] {
    const rect = this.els.overlaySvg.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  }

  private syncInputs(): void {
    const rows = Array.from(this.els.planRows.querySelectorAll("tr.plan-row"));
    this.session.plan = rows.map((row): PlanRow => {
      const num = (cls: string) =>
        Number((row.querySelector(`input.${cls}`) as HTMLInputElement).value) || 0;
      const gripper = (row.querySelector("select.plan-gripper") as HTMLSelectElement)
        .value;
      return {
        x: num("plan-x"),
        y: num("plan-y"),
        z: num("plan-z"),
        gripper: gripper === "" ? null : (gripper as MarkerKind),
      };
    });
    const k = Math.trunc(Number(this.els.kInput.value));
    this.session.k = k >= 1 ? k : 10;
    render(this.session, this.els);
  }

  private onPointerDown(e: MouseEvent): void {
    const session = this.session;
    const pixel = this.pointerPixel(e);
    if (session.mode === "draw") {
      this.drawing = session.addSample(pixel[0], pixel[1]);
    } else if (session.mode === "height") {
      session.addHeight(pixel, Number(this.els.heightValue.value) || 0);
    } else {
      session.addMarker(pixel, session.mode);
    }
    render(session, this.els);
  }

  private onPointerMove(e: MouseEvent): void {
    if (!this.drawing) return;
    const pixel = this.pointerPixel(e);
    this.session.addSample(pixel[0], pixel[1]);
    render(this.session, this.els);
  }

  private bind(): void {
    const els = this.els;
    for (const [mode, btn] of Object.entries(els.modeButtons)) {
      btn.addEventListener("click", () => {
        this.session.mode = mode as ToolMode;
        render(this.session, els);
      });
    }
    els.clearBtn.addEventListener("click", () => {
      this.session.clearStroke();
      render(this.session, els);
    });
    els.submitBtn.addEventListener("click", () => void this.submit());
    els.compareBtn.addEventListener("click", () => void this.compare());
    els.retryBtn.addEventListener("click", () => void this.retry());
    els.addRowBtn.addEventListener("click", () => this.addPlanRow());
    els.planRows.addEventListener("input", () => this.syncInputs());
    els.planRows.addEventListener("change", () => this.syncInputs());
    els.kInput.addEventListener("change", () => this.syncInputs());

    els.canvasWrap.addEventListener("pointerdown", (e) =>
      this.onPointerDown(e as MouseEvent),
    );
    els.canvasWrap.addEventListener("pointermove", (e) =>
      this.onPointerMove(e as MouseEvent),
    );
    const stop = () => {
      this.drawing = false;
    };
    els.canvasWrap.addEventListener("pointerup", stop);
    els.canvasWrap.addEventListener("pointerleave", stop);
  }
}
