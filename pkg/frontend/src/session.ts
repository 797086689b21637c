import { SessionBuffers } from "./buffers";
import type { Command, ServerMessage, StateMessage } from "./types";

export type ConnectionState = "connecting" | "live" | "retrying" | "closed";

export interface AckEntry {
  seq: number | string;
  label: string;
  status: "pending" | "ack" | "err";
  reason?: string;
}

// Narrow view of the browser WebSocket so tests (and node) can inject fakes.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionOptions {
  socketFactory?: SocketFactory;
  windowSeconds?: number;
  retryStartMs?: number;
  retryCapMs?: number;
}

const ACK_LOG_LIMIT = 50;

function describeCommand(cmd: Command): string {
  switch (cmd.type) {
    case "set_motion":
      return cmd.period === undefined
        ? `set_motion ${cmd.id}`
        : `set_motion ${cmd.id} T=${cmd.period}`;
    case "set_gamma":
      return `set_gamma ${cmd.value}`;
    default:
      return cmd.type;
  }
}

// View model for one live connection. All mutation happens here, driven by
// socket events and user commands; rendering just reads the public fields.
// Every command sent appends exactly one log entry, which later flips from
// pending to ack or err (a dropped connection fails its pending entries).
export class Session {
  state: ConnectionState = "closed";
  buffers: SessionBuffers;
  last: StateMessage | null = null;
  ackLog: AckEntry[] = [];
  messagesSeen = 0;
  onchange: (() => void) | null = null;

  private socket: SocketLike | null = null;
  private readonly factory: SocketFactory;
  private readonly retryStartMs: number;
  private readonly retryCapMs: number;
  private pending = new Map<number | string, AckEntry>();
  private seq = 0;
  private retryMs: number;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;

  constructor(
    readonly url: string,
    opts: SessionOptions = {},
  ) {
    this.factory =
      opts.socketFactory ??
      ((u) => new WebSocket(u) as unknown as SocketLike);
    this.buffers = new SessionBuffers(opts.windowSeconds ?? 30);
    this.retryStartMs = opts.retryStartMs ?? 1000;
    this.retryCapMs = opts.retryCapMs ?? 8000;
    this.retryMs = this.retryStartMs;
  }

  connect(): void {
    this.closedByUser = false;
    this.state = "connecting";
    this.open();
    this.notify();
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    const socket = this.socket;
    this.socket = null;
    if (socket) {
      socket.onopen = socket.onmessage = socket.onclose = socket.onerror = null;
      socket.close();
    }
    this.state = "closed";
    this.notify();
  }

  send(cmd: Command): number | null {
    if (this.state !== "live" || !this.socket) return null;
    const seq = ++this.seq;
    const entry: AckEntry = {
      seq,
      label: describeCommand(cmd),
      status: "pending",
    };
    this.pending.set(seq, entry);
    this.pushLog(entry);
    this.socket.send(JSON.stringify({ ...cmd, seq }));
    this.notify();
    return seq;
  }

  private open(): void {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.state = "live";
      this.retryMs = this.retryStartMs;
      this.notify();
    };
    socket.onmessage = (ev) => this.handleMessage(String(ev.data));
    socket.onerror = () => {};
    socket.onclose = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      this.failPending("connection dropped");
      if (this.closedByUser) {
        this.state = "closed";
      } else {
        this.state = "retrying";
        this.retryTimer = setTimeout(() => {
          this.retryTimer = null;
          this.open();
        }, this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, this.retryCapMs);
      }
      this.notify();
    };
  }

  private handleMessage(raw: string): void {
    let msg: ServerMessage;
    try {
      msg = JSON.parse(raw);
    } catch {
      return;
    }
    this.messagesSeen++;
    if (msg.type === "state") {
      this.buffers.push(msg);
      this.last = msg;
    } else if (msg.type === "ack" || msg.type === "err") {
      const entry = this.pending.get(msg.seq as number | string);
      if (entry) {
        this.pending.delete(msg.seq as number | string);
        entry.status = msg.type;
        if (msg.type === "err") entry.reason = msg.reason;
      } else {
        // Not one of ours (e.g. a reply raced a reconnect); still show it.
        this.pushLog({
          seq: msg.seq ?? "?",
          label: "(server)",
          status: msg.type,
          reason: msg.type === "err" ? msg.reason : undefined,
        });
      }
    }
    this.notify();
  }

  private failPending(reason: string): void {
    for (const entry of this.pending.values()) {
      entry.status = "err";
      entry.reason = reason;
    }
    this.pending.clear();
  }

  private pushLog(entry: AckEntry): void {
    this.ackLog.push(entry);
    if (this.ackLog.length > ACK_LOG_LIMIT) {
      this.ackLog.splice(0, this.ackLog.length - ACK_LOG_LIMIT);
    }
  }

  private notify(): void {
    this.onchange?.();
  }
}
