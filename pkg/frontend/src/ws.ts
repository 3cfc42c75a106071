/**
 * Interaction channel: one WebSocket per session, gesture-level API.
 *
 * Outbound messages flow through a FIFO queue so user intent keeps its
 * order. move_control is special-cased twice: a new move replaces a
 * trailing move for the same index (latest wins — intermediate drag
 * positions are disposable), and moves leave the queue only when the
 * rate gate allows, so any one-second window of continuous drag carries
 * at most the configured message budget (default 60/s).
 *
 * The socket constructor, clock, and timers are injectable: browsers pass
 * nothing, tests pass fakes, Node passes the `ws` package constructor.
 * On unexpected close the channel reconnects with exponential backoff;
 * connecting is subscribing (the server replays the current embedding on
 * accept), and onReconnect lets the app refetch REST state it may have
 * missed while offline.
 */

import type { InteractionMessage, LinkKind, ServerEvent, StrengthTarget } from "./types.js";

export interface WebSocketLike {
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event?: unknown) => void) | null;
  onerror: ((event?: unknown) => void) | null;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export type ChannelStatus = "connecting" | "open" | "reconnecting" | "stopped";

export interface ChannelOptions {
  url: string;
  onEvent: (event: ServerEvent) => void;
  /** Called after a successful reconnect (not the initial connect). */
  onReconnect?: () => void;
  onStatus?: (status: ChannelStatus) => void;
  socketFactory?: WebSocketFactory;
  /** Upper bound on move_control messages per second. Default 60. */
  maxMovesPerSecond?: number;
  reconnect?: boolean;
  backoffBaseMs?: number;
  backoffMaxMs?: number;
  now?: () => number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

function defaultFactory(url: string): WebSocketLike {
  const ctor = (globalThis as { WebSocket?: new (url: string) => WebSocketLike })
    .WebSocket;
  if (ctor === undefined) {
    throw new Error(
      "no global WebSocket; pass socketFactory (e.g. the ws package)");
  }
  return new ctor(url);
}

export class InteractionChannel {
  private readonly url: string;
  private readonly onEvent: (event: ServerEvent) => void;
  private readonly onReconnect?: () => void;
  private readonly onStatus?: (status: ChannelStatus) => void;
  private readonly factory: WebSocketFactory;
  private readonly gapMs: number;
  private readonly reconnectEnabled: boolean;
  private readonly backoffBaseMs: number;
  private readonly backoffMaxMs: number;
  private readonly now: () => number;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;

  private socket: WebSocketLike | null = null;
  private status: ChannelStatus = "stopped";
  private everOpened = false;
  private attempts = 0;
  private queue: InteractionMessage[] = [];
  private lastMoveSentAt = -Infinity;
  private drainTimer: unknown = null;
  private reconnectTimer: unknown = null;

  constructor(options: ChannelOptions) {
    this.url = options.url;
    this.onEvent = options.onEvent;
    this.onReconnect = options.onReconnect;
    this.onStatus = options.onStatus;
    this.factory = options.socketFactory ?? defaultFactory;
    const budget = options.maxMovesPerSecond ?? 60;
    if (!(budget > 0)) {
      throw new Error("maxMovesPerSecond must be positive");
    }
    this.gapMs = Math.ceil(1000 / budget);
    this.reconnectEnabled = options.reconnect ?? true;
    this.backoffBaseMs = options.backoffBaseMs ?? 250;
    this.backoffMaxMs = options.backoffMaxMs ?? 8000;
    this.now = options.now ?? (() => Date.now());
    this.setTimer = options.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = options.clearTimer ?? ((handle) =>
      clearTimeout(handle as Parameters<typeof clearTimeout>[0]));
  }

  connect(): void {
    if (this.status === "connecting" || this.status === "open") return;
    this.openSocket();
  }

  close(): void {
    this.setStatus("stopped");
    if (this.drainTimer !== null) {
      this.clearTimer(this.drainTimer);
      this.drainTimer = null;
    }
    if (this.reconnectTimer !== null) {
      this.clearTimer(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.queue = [];
    const socket = this.socket;
    this.socket = null;
    if (socket !== null) {
      socket.onclose = null;
      socket.close();
    }
  }

  get currentStatus(): ChannelStatus {
    return this.status;
  }

  /** Number of queued outbound messages (drains as the gate allows). */
  get pendingCount(): number {
    return this.queue.length;
  }

  // -- gestures ---------------------------------------------------------------

  /** Drag start on a free point: pin it where it currently sits. */
  dragStart(index: number, x: number, y: number): void {
    this.enqueue({ type: "add_control", index, x, y });
  }

  /** Drag in progress: retarget the pinned point (rate-limited). */
  dragMove(index: number, x: number, y: number): void {
    this.enqueue({ type: "move_control", index, x, y });
  }

  removeControl(index: number): void {
    this.enqueue({ type: "remove_control", index });
  }

  addLink(kind: LinkKind, i: number, j: number): void {
    this.enqueue({ type: "add_link", kind, i, j });
  }

  removeLink(kind: LinkKind, i: number, j: number): void {
    this.enqueue({ type: "remove_link", kind, i, j });
  }

  setStrength(target: StrengthTarget, value: number): void {
    this.enqueue({ type: "set_strength", target, value });
  }

  send(message: InteractionMessage): void {
    this.enqueue(message);
  }

  // -- internals ---------------------------------------------------------------

  private enqueue(message: InteractionMessage): void {
    if (this.status === "stopped" && this.socket === null) {
      throw new Error("channel is not connected; call connect() first");
    }
    if (message.type === "move_control" && this.queue.length > 0) {
      const tail = this.queue[this.queue.length - 1];
      if (tail !== undefined && tail.type === "move_control" &&
          tail.index === message.index) {
        this.queue[this.queue.length - 1] = message;
        this.drain();
        return;
      }
    }
    this.queue.push(message);
    this.drain();
  }

  private drain(): void {
    if (this.status !== "open" || this.socket === null) return;
    while (this.queue.length > 0) {
      const head = this.queue[0];
      if (head === undefined) return;
      if (head.type === "move_control") {
        const wait = this.lastMoveSentAt + this.gapMs - this.now();
        if (wait > 0) {
          this.scheduleDrain(wait);
          return;
        }
        this.lastMoveSentAt = this.now();
      }
      this.queue.shift();
      this.socket.send(JSON.stringify(head));
    }
  }

  private scheduleDrain(delayMs: number): void {
    if (this.drainTimer !== null) return;
    this.drainTimer = this.setTimer(() => {
      this.drainTimer = null;
      this.drain();
    }, delayMs);
  }

  private openSocket(): void {
    this.setStatus(this.everOpened ? "reconnecting" : "connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      if (this.socket !== socket) return;
      const isReconnect = this.everOpened;
      this.everOpened = true;
      this.attempts = 0;
      this.setStatus("open");
      if (isReconnect && this.onReconnect !== undefined) {
        this.onReconnect();
      }
      this.drain();
    };
    socket.onmessage = (event) => {
      if (this.socket !== socket) return;
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(event.data));
      } catch {
        return;
      }
      if (typeof parsed === "object" && parsed !== null && "type" in parsed) {
        this.onEvent(parsed as ServerEvent);
      }
    };
    socket.onclose = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      if (!this.reconnectEnabled || this.status === "stopped") {
        this.setStatus("stopped");
        return;
      }
      this.attempts += 1;
      const delay = Math.min(
        this.backoffBaseMs * 2 ** (this.attempts - 1),
        this.backoffMaxMs,
      );
      this.setStatus("reconnecting");
      this.reconnectTimer = this.setTimer(() => {
        this.reconnectTimer = null;
        this.openSocket();
      }, delay);
    };
    socket.onerror = () => {
      // The close handler owns recovery; errors always precede a close.
    };
  }

  private setStatus(status: ChannelStatus): void {
    if (status === this.status) return;
    this.status = status;
    if (this.onStatus !== undefined) {
      this.onStatus(status);
    }
  }
}
