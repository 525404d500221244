import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  void createApp(root).init();
}
