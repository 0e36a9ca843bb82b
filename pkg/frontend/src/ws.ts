/** Patch-stream socket with automatic reconnect and re-sync hooks. */

import type { Patch } from "./types";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export class EventStream {
  private socket: SocketLike | null = null;
  private stopped = false;
  private retryDelay = 500;

  constructor(
    private url: string,
    private onPatch: (patch: Patch) => void,
    private onStatus: (connected: boolean) => void,
    private factory: SocketFactory = (url) => new WebSocket(url) as unknown as SocketLike,
    private schedule: (fn: () => void, ms: number) => void = (fn, ms) => void setTimeout(fn, ms),
  ) {}

  connect(): void {
    this.socket = this.factory(this.url);
    this.socket.onopen = () => {
      this.retryDelay = 500;
      this.onStatus(true);
    };
    this.socket.onmessage = (event) => {
      this.onPatch(JSON.parse(event.data) as Patch);
    };
    this.socket.onclose = () => {
      this.onStatus(false);
      if (this.stopped) return;
      this.schedule(() => this.connect(), this.retryDelay);
      this.retryDelay = Math.min(this.retryDelay * 2, 10_000);
    };
  }

  close(): void {
    this.stopped = true;
    this.socket?.close();
  }
}
