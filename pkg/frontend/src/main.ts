import { Api } from "./api.js";
import { App } from "./app.js";

declare global {
  interface Window {
    API_BASE?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  const app = new App(root as HTMLElement, new Api(window.API_BASE ?? ""));
  void app.init().catch((error) => {
    root.textContent = `failed to start: ${error}`;
  });
}
