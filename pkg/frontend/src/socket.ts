/**
 * Resilient WebSocket wrapper: exponential backoff on close, listener
 * fan-out, and send() that reports instead of throwing while down.
 */

export type SocketStatus = "connecting" | "open" | "closed";

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 5000;

export function nextBackoff(ms: number): number {
  return Math.min(BACKOFF_MAX_MS, ms * 2);
}

type TextListener = (text: string) => void;
type StatusListener = (status: SocketStatus) => void;

export class EngineSocket {
  private url: string;
  private ws: WebSocket | null = null;
  private textListeners = new Set<TextListener>();
  private statusListeners = new Set<StatusListener>();
  private backoffMs = BACKOFF_START_MS;
  private shouldRun = true;

  constructor(url: string) {
    this.url = url;
    this.connect();
  }

  private connect(): void {
    if (!this.shouldRun) return;
    this.emitStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.backoffMs = BACKOFF_START_MS;
      this.emitStatus("open");
    };
    this.ws.onmessage = (ev) => {
      for (const listener of this.textListeners) listener(String(ev.data));
    };
    this.ws.onclose = () => {
      this.emitStatus("closed");
      if (!this.shouldRun) return;
      const delay = this.backoffMs;
      this.backoffMs = nextBackoff(this.backoffMs);
      setTimeout(() => this.connect(), delay);
    };
    this.ws.onerror = () => {
      this.ws?.close();
    };
  }

  private emitStatus(status: SocketStatus): void {
    for (const listener of this.statusListeners) listener(status);
  }

  get open(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(text: string): boolean {
    if (!this.open) return false;
    this.ws!.send(text);
    return true;
  }

  onText(listener: TextListener): () => void {
    this.textListeners.add(listener);
    return () => this.textListeners.delete(listener);
  }

  onStatus(listener: StatusListener): () => void {
    this.statusListeners.add(listener);
    return () => this.statusListeners.delete(listener);
  }

  close(): void {
    this.shouldRun = false;
    this.ws?.close();
  }
}
