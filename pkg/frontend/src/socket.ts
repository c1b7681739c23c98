/**
 * WebSocket transport to the console service.
 *
 * One socket, auto-reconnect with capped exponential backoff, and a
 * full-state resync over GET /state after every reconnect (the connection
 * may have missed events while down).
 */

import type { Command, StateDoc } from "./protocol.js";

export interface SocketCallbacks {
  onEvent: (event: unknown) => void;
  onStatus: (status: "connecting" | "connected" | "disconnected") => void;
}

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 10_000;

export class ConsoleSocket {
  private socket: WebSocket | null = null;
  private backoffMs = BACKOFF_START_MS;
  private closed = false;

  constructor(
    private readonly baseUrl: string,
    private readonly callbacks: SocketCallbacks,
  ) {}

  connect(): void {
    if (this.closed) return;
    this.callbacks.onStatus("connecting");
    const wsUrl = this.baseUrl.replace(/^http/, "ws") + "/ws";
    const socket = new WebSocket(wsUrl);
    this.socket = socket;

    socket.onopen = () => {
      this.backoffMs = BACKOFF_START_MS;
      this.callbacks.onStatus("connected");
      void this.resync();
    };
    socket.onmessage = (message: MessageEvent) => {
      try {
        this.callbacks.onEvent(JSON.parse(String(message.data)));
      } catch {
        console.warn("dropping unparseable server message");
      }
    };
    socket.onclose = () => {
      this.callbacks.onStatus("disconnected");
      this.scheduleReconnect();
    };
    socket.onerror = () => {
      socket.close();
    };
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    setTimeout(() => this.connect(), this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
  }

  /** Pull the authoritative state once; delivered as a synthetic event. */
  async resync(): Promise<void> {
    try {
      const response = await fetch(this.baseUrl + "/state");
      const state = (await response.json()) as StateDoc;
      this.callbacks.onEvent({ kind: "state_changed", state });
    } catch {
      console.warn("state resync failed; waiting for events");
    }
  }

  send(command: Command): boolean {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(command));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
