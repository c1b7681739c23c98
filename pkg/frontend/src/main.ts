/**
 * Bootstrap: fetch the console definition, open the socket, wire the
 * render loop. Single event loop, one socket, server-authoritative state.
 */

import type { Command, ConfigDoc } from "./protocol.js";
import { ConsoleSocket } from "./socket.js";
import { isDragInProgress, render, type RenderContext } from "./render.js";
import {
  applyLocalEcho,
  applyServerEvent,
  initialViewState,
  setConnection,
  type ViewState,
} from "./state.js";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ??
  `${location.protocol}//${location.host}`;

async function boot(): Promise<void> {
  const root = document.getElementById("console");
  if (!root) throw new Error("missing #console mount point");

  const config = (await (await fetch(`${SERVICE_URL}/config`)).json()) as ConfigDoc;

  let view: ViewState = initialViewState();
  let renderQueued = false;

  const scheduleRender = () => {
    if (renderQueued) return;
    renderQueued = true;
    requestAnimationFrame(() => {
      renderQueued = false;
      // don't rebuild the DOM out from under an active drag
      if (!isDragInProgress()) render(context, view);
    });
  };

  const socket = new ConsoleSocket(SERVICE_URL, {
    onEvent: (event) => {
      view = applyServerEvent(view, event);
      scheduleRender();
    },
    onStatus: (status) => {
      view = setConnection(view, status);
      scheduleRender();
    },
  });

  const send = (command: Command) => {
    if (socket.send(command)) {
      view = applyLocalEcho(view, command);
      scheduleRender();
    }
  };

  const context: RenderContext = { root, config, send };
  render(context, view);
  socket.connect();
}

boot().catch((error) => {
  const root = document.getElementById("console");
  if (root) root.textContent = `failed to start: ${error}`;
});
