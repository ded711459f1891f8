// Browser entry point. The service base URL comes from ?service=... or
// defaults to the page origin; ?workspace=... reopens an existing one.

import { ServiceClient } from "./api.js";
import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? window.location.origin;
const workspaceId = params.get("workspace") ?? undefined;

const rootEl = document.getElementById("app");
if (rootEl === null) {
  throw new Error("missing #app element");
}

void createApp(rootEl, new ServiceClient(baseUrl), { workspaceId }).then(
  (app) => {
    const url = new URL(window.location.href);
    url.searchParams.set("workspace", app.workspaceId);
    window.history.replaceState(null, "", url);
  },
);
