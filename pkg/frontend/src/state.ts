/**
 * Application view state and its invariants.
 *
 * Three views share one state object: summary, clustering, embedding.
 * Clustering and embedding actions require a live session, and the three
 * constraint-strength sliders hold integer positions 0..1000 that map to
 * solver strengths on a log scale (position 0 is an exact off-detent so a
 * slider dragged all the way left removes the corresponding penalty term
 * entirely).
 */

import type { Filter } from "./types.js";

export type ActiveView = "summary" | "clustering" | "embedding";

export const SLIDER_MIN = 0;
export const SLIDER_MAX = 1000;

export interface SliderPositions {
  mu_cp: number;
  mu_ml: number;
  mu_cl: number;
}

export interface ViewState {
  activeView: ActiveView;
  collection: string | null;
  filter: Filter | null;
  sessionId: string | null;
  selection: ReadonlySet<number>;
  sliders: SliderPositions;
}

export function initialState(): ViewState {
  return {
    activeView: "summary",
    collection: null,
    filter: null,
    sessionId: null,
    selection: new Set(),
    sliders: {
      mu_cp: strengthToSlider(100),
      mu_ml: strengthToSlider(1),
      mu_cl: strengthToSlider(1),
    },
  };
}

/** Views that act on a session are reachable only once one exists. */
export function canActivate(state: ViewState, view: ActiveView): boolean {
  if (view === "summary") return true;
  return state.sessionId !== null;
}

export function setActiveView(state: ViewState, view: ActiveView): ViewState {
  if (!canActivate(state, view)) {
    throw new Error(`the ${view} view needs an active session`);
  }
  return { ...state, activeView: view };
}

export function setCollection(state: ViewState, collection: string): ViewState {
  // A new collection invalidates the session and any selection in it.
  return {
    ...state,
    collection,
    sessionId: null,
    selection: new Set(),
    activeView: "summary",
  };
}

export function setFilter(state: ViewState, filter: Filter | null): ViewState {
  return { ...state, filter };
}

export function setSession(state: ViewState, sessionId: string): ViewState {
  return { ...state, sessionId, selection: new Set() };
}

export function toggleSelection(state: ViewState, index: number): ViewState {
  const selection = new Set(state.selection);
  if (selection.has(index)) {
    selection.delete(index);
  } else {
    selection.add(index);
  }
  return { ...state, selection };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selection: new Set() };
}

export function setSlider(
  state: ViewState,
  target: keyof SliderPositions,
  position: number,
): ViewState {
  if (!Number.isFinite(position) ||
      position < SLIDER_MIN || position > SLIDER_MAX) {
    throw new Error(
      `slider position must lie in [${SLIDER_MIN}, ${SLIDER_MAX}]`);
  }
  return { ...state, sliders: { ...state.sliders, [target]: position } };
}

/**
 * Slider position -> solver strength.
 *
 * Log scale over [0.01, 100] with position 0 mapping to exactly 0, so the
 * left detent turns a penalty off rather than merely weakening it.
 */
export function sliderToStrength(position: number): number {
  if (position === SLIDER_MIN) return 0;
  return 10 ** ((position - 500) / 250);
}

/** Inverse of sliderToStrength for seeding sliders from server strengths. */
export function strengthToSlider(strength: number): number {
  if (strength <= 0) return SLIDER_MIN;
  const position = Math.round(500 + 250 * Math.log10(strength));
  return Math.min(SLIDER_MAX, Math.max(SLIDER_MIN, position));
}
