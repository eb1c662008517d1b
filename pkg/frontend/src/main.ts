import { startApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get("server") ?? "http://127.0.0.1:8464";
const root = document.getElementById("app");
if (root) {
  startApp(root, serverUrl).catch((err) => {
    root.textContent = `Could not reach the alert server: ${err}`;
  });
}
