import { StudioApi } from "./api";
import { StudioApp } from "./app";

const params = new URLSearchParams(window.location.search);
const server = params.get("server") ?? "http://127.0.0.1:8000";
const scene = params.get("scene") ?? "scene-main";

const root = document.getElementById("studio");
if (root) {
  const app = new StudioApp(root, new StudioApi(server));
  void app.loadScene(scene);
}
