import { ApiClient } from "./api.js";
import { AdvisorApp } from "./ui.js";

const app = new AdvisorApp(document, new ApiClient(""));
app.init();

declare global {
  interface Window {
    einzApp: AdvisorApp;
  }
}
window.einzApp = app;
