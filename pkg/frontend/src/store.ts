/**
 * Client-side embedding state: the latest server event wins.
 *
 * Events carry a monotonically increasing version; anything at or below
 * the last applied version is stale (reordered or replayed) and dropped.
 * For visual continuity the store keeps the previous coordinates and a
 * timestamp so the renderer can interpolate over a short window — the
 * authoritative coordinates are always the latest event's, untouched.
 */

import type {
  ConstraintsJson,
  Coords,
  EmbeddingEvent,
  EmbeddingPayload,
} from "./types.js";

export const ANIMATION_MS = 150;

export class EmbeddingStore {
  private readonly now: () => number;

  private latest: EmbeddingPayload | null = null;
  private previous: Coords | null = null;
  private appliedAt = 0;

  /** Events accepted (version advanced). */
  appliedCount = 0;
  /** Events dropped as stale (version <= last applied). */
  droppedCount = 0;

  constructor(now?: () => number) {
    this.now = now ?? (() => Date.now());
  }

  get version(): number {
    return this.latest === null ? 0 : this.latest.version;
  }

  get method(): string | null {
    return this.latest === null ? null : this.latest.method;
  }

  get coords(): Coords | null {
    return this.latest === null ? null : this.latest.coords;
  }

  get constraints(): ConstraintsJson | null {
    return this.latest === null ? null : this.latest.constraints;
  }

  /**
   * Apply an embedding event or REST payload. Returns true when applied,
   * false when dropped as stale.
   */
  apply(event: EmbeddingEvent | EmbeddingPayload): boolean {
    if (this.latest !== null && event.version <= this.latest.version) {
      this.droppedCount += 1;
      return false;
    }
    this.previous = this.latest === null ? null : this.latest.coords;
    this.latest = {
      version: event.version,
      method: event.method,
      coords: event.coords,
      constraints: event.constraints,
    };
    this.appliedAt = this.now();
    this.appliedCount += 1;
    return true;
  }

  /**
   * Coordinates to draw at the given time: a linear blend from the
   * previous frame for ANIMATION_MS after an update, the latest after.
   */
  coordsAt(timeMs: number): Coords | null {
    if (this.latest === null) return null;
    const target = this.latest.coords;
    if (this.previous === null || this.previous.length !== target.length) {
      return target;
    }
    const t = (timeMs - this.appliedAt) / ANIMATION_MS;
    if (t >= 1) return target;
    const s = t < 0 ? 0 : t;
    return target.map(([x, y], i) => {
      const prev = this.previous![i]!;
      return [prev[0] + (x - prev[0]) * s, prev[1] + (y - prev[1]) * s];
    });
  }

  /** True while coordsAt still differs from the final coordinates. */
  animating(timeMs: number): boolean {
    return this.latest !== null && this.previous !== null &&
      timeMs - this.appliedAt < ANIMATION_MS;
  }
}
