/**
 * Browser bootstrap: wires the moleda server to the three views.
 *
 * Summary is always reachable; clustering and embedding unlock once a
 * session exists. One WebSocket per session carries interactions; inbound
 * embedding events flow through EmbeddingStore (stale events dropped) and
 * a requestAnimationFrame loop redraws while the 150 ms blend settles.
 * This module owns DOM plumbing and drag geometry — every displayed
 * number still comes from a server payload via the view renderers.
 */

import { ApiClient } from "./api.js";
import type {
  ClusteringJson,
  DocumentJson,
  SearchResponse,
  ServerEvent,
} from "./types.js";
import { InteractionChannel } from "./ws.js";
import { EmbeddingStore } from "./store.js";
import type { ActiveView, ViewState } from "./state.js";
import {
  canActivate,
  initialState,
  setActiveView,
  setCollection,
  setSession,
  setSlider,
  sliderToStrength,
} from "./state.js";
import type { ScatterDomain } from "./layout.js";
import { expandDomain, scatterLayout } from "./layout.js";
import { renderSummary } from "./views/summary.js";
import { renderClustering } from "./views/clustering.js";
import { renderEmbedding } from "./views/embedding.js";
import type { MoleculeDetail } from "./views/inspector.js";
import { renderInspector } from "./views/inspector.js";

interface AppElements {
  collectionSelect: HTMLSelectElement;
  startButton: HTMLButtonElement;
  tabs: NodeListOf<HTMLButtonElement>;
  view: HTMLElement;
  inspector: HTMLElement;
  searchBox: HTMLInputElement;
  status: HTMLElement;
}

interface AppRuntime {
  state: ViewState;
  store: EmbeddingStore;
  channel: InteractionChannel | null;
  documents: DocumentJson[];
  clustering: ClusteringJson | null;
  search: SearchResponse | null;
  domain: ScatterDomain | null;
  dragging: { index: number } | null;
  linkArm: { kind: "must" | "cannot"; first: number | null } | null;
  detail: MoleculeDetail | null;
  animationHandle: number | null;
}

function elements(): AppElements {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = document.getElementById(id);
    if (node === null) throw new Error(`missing #${id}`);
    return node as T;
  };
  return {
    collectionSelect: byId("collection"),
    startButton: byId("start-session"),
    tabs: document.querySelectorAll<HTMLButtonElement>("nav.tabs button"),
    view: byId("view"),
    inspector: byId("inspector"),
    searchBox: byId("search"),
    status: byId("status"),
  };
}

export function startApp(baseUrl: string): void {
  const api = new ApiClient(baseUrl);
  const ui = elements();
  const runtime: AppRuntime = {
    state: initialState(),
    store: new EmbeddingStore(),
    channel: null,
    documents: [],
    clustering: null,
    search: null,
    domain: null,
    dragging: null,
    linkArm: null,
    detail: null,
    animationHandle: null,
  };

  const setStatus = (text: string): void => {
    ui.status.textContent = text;
  };

  const scatterGeometry = () => {
    const coords = runtime.store.coordsAt(Date.now());
    if (coords === null) return null;
    runtime.domain = runtime.domain === null
      ? expandDomain({ xLo: -1, xHi: 1, yLo: -1, yHi: 1 }, coords)
      : expandDomain(runtime.domain, coords);
    return scatterLayout(coords, runtime.domain);
  };

  const highlightSet = (): ReadonlySet<number> | null => {
    if (runtime.search === null || runtime.search.query === "") return null;
    return new Set(runtime.search.matches.map((match) => match.index));
  };

  const render = (): void => {
    const view = runtime.state.activeView;
    if (view === "summary") {
      // Summary renders on demand in refreshSummary; keep content as-is.
    } else if (view === "clustering") {
      const geometry = scatterGeometry();
      ui.view.innerHTML = runtime.clustering === null
        ? `<p class="placeholder">Run a clustering to see metrics.</p>`
        : renderClustering(runtime.clustering, geometry);
    } else {
      ui.view.innerHTML = renderEmbedding({
        method: runtime.store.method,
        version: runtime.store.version,
        scatter: scatterGeometry(),
        constraints: runtime.store.constraints,
        quality: null,
        sliders: runtime.state.sliders,
        selection: runtime.state.selection,
        highlights: highlightSet(),
      });
    }
    ui.inspector.innerHTML = renderInspector(runtime.detail, runtime.search);
  };

  const animate = (): void => {
    if (runtime.animationHandle !== null) return;
    const tick = (): void => {
      runtime.animationHandle = null;
      render();
      if (runtime.store.animating(Date.now())) {
        runtime.animationHandle = requestAnimationFrame(tick);
      }
    };
    runtime.animationHandle = requestAnimationFrame(tick);
  };

  const onServerEvent = (event: ServerEvent): void => {
    if (event.type === "error") {
      setStatus(`server: ${event.code} — ${event.message}`);
      return;
    }
    if (runtime.store.apply(event)) animate();
  };

  const openChannel = (sessionId: string): void => {
    runtime.channel?.close();
    runtime.channel = new InteractionChannel({
      url: api.wsUrl(sessionId),
      onEvent: onServerEvent,
      onReconnect: () => {
        void api.getEmbedding(sessionId)
          .then((payload) => {
            if (runtime.store.apply(payload)) animate();
          })
          .catch(() => setStatus("reconnected; no embedding yet"));
      },
      onStatus: (status) => setStatus(`socket: ${status}`),
    });
    runtime.channel.connect();
  };

  const refreshSummary = async (): Promise<void> => {
    const collection = runtime.state.collection;
    if (collection === null) return;
    const fields = await api.collectionFields(collection);
    const names = fields.fields.map((field) => field.name);
    const summaries = names.length === 0
      ? []
      : await api.summarize(collection, names,
          runtime.state.filter === null ? {} : { filter: runtime.state.filter });
    if (runtime.state.activeView === "summary") {
      ui.view.innerHTML = renderSummary(summaries);
    }
  };

  const activateTab = (view: ActiveView): void => {
    if (!canActivate(runtime.state, view)) {
      setStatus(`start a session to open the ${view} view`);
      return;
    }
    runtime.state = setActiveView(runtime.state, view);
    ui.tabs.forEach((tab) => {
      tab.classList.toggle("active", tab.dataset.view === view);
    });
    if (view === "summary") {
      void refreshSummary();
    } else {
      render();
    }
  };

  // -- initial load ------------------------------------------------------------

  void api.listCollections().then((list) => {
    ui.collectionSelect.innerHTML = list.collections
      .map((info) => `<option value="${info.name}">${info.name} (${info.size})</option>`)
      .join("");
    const first = list.collections[0];
    if (first !== undefined) {
      runtime.state = setCollection(runtime.state, first.name);
      void refreshSummary();
    }
  }).catch((error: unknown) => setStatus(`cannot reach server: ${String(error)}`));

  ui.collectionSelect.addEventListener("change", () => {
    runtime.state = setCollection(runtime.state, ui.collectionSelect.value);
    runtime.channel?.close();
    runtime.channel = null;
    void refreshSummary();
  });

  ui.startButton.addEventListener("click", () => {
    const collection = runtime.state.collection;
    if (collection === null) return;
    void (async () => {
      const session = await api.createSession(collection);
      runtime.state = setSession(runtime.state, session.id);
      await api.fingerprint(session.id, { method: "hashed_path" });
      const embedded = await api.embed(session.id, { method: "ckpca" });
      runtime.domain = null;
      runtime.store = new EmbeddingStore();
      runtime.store.apply(embedded);
      const clustering = await api.cluster(session.id, { k: 5 });
      runtime.clustering = clustering;
      openChannel(session.id);
      setStatus(`session ${session.id} over ${session.count} molecules`);
      activateTab("embedding");
    })().catch((error: unknown) => setStatus(String(error)));
  });

  ui.tabs.forEach((tab) => {
    tab.addEventListener("click", () => {
      activateTab((tab.dataset.view ?? "summary") as ActiveView);
    });
  });

  ui.searchBox.addEventListener("input", () => {
    const sessionId = runtime.state.sessionId;
    const query = ui.searchBox.value;
    if (sessionId === null) return;
    if (query === "") {
      runtime.search = null;
      render();
      return;
    }
    void api.search(sessionId, query).then((result) => {
      runtime.search = result;
      render();
    });
  });

  // -- pointer interactions on the embedding scatter ------------------------------

  const pointIndex = (target: EventTarget | null): number | null => {
    if (!(target instanceof Element)) return null;
    const raw = target.getAttribute("data-index");
    if (raw === null) return null;
    const index = Number(raw);
    return Number.isInteger(index) ? index : null;
  };

  const dragTarget = (event: PointerEvent): [number, number] | null => {
    const svg = ui.view.querySelector<SVGSVGElement>("svg.embedding-scatter");
    const geometry = scatterGeometry();
    if (svg === null || geometry === null) return null;
    const rect = svg.getBoundingClientRect();
    const pxX = ((event.clientX - rect.left) / rect.width) * geometry.width;
    const pxY = ((event.clientY - rect.top) / rect.height) * geometry.height;
    return geometry.toData(pxX, pxY);
  };

  ui.view.addEventListener("pointerdown", (event) => {
    if (runtime.state.activeView !== "embedding") return;
    const index = pointIndex(event.target);
    if (index === null || runtime.channel === null) return;
    if (runtime.store.method !== "ckpca") {
      setStatus("dragging needs a ckpca embedding");
      return;
    }
    if (runtime.linkArm !== null) {
      if (runtime.linkArm.first === null) {
        runtime.linkArm.first = index;
        setStatus(`link: first point ${index}; click a second point`);
      } else if (runtime.linkArm.first !== index) {
        runtime.channel.addLink(runtime.linkArm.kind, runtime.linkArm.first, index);
        setStatus(`${runtime.linkArm.kind}-link ${runtime.linkArm.first} — ${index}`);
        runtime.linkArm.first = null;
      }
      return;
    }
    const coords = runtime.store.coords;
    const position = coords === null ? null : coords[index];
    if (position === undefined || position === null) return;
    const controls = runtime.store.constraints?.control_points ?? [];
    if (!controls.some((point) => point.index === index)) {
      runtime.channel.dragStart(index, position[0], position[1]);
    }
    runtime.dragging = { index };
    (event.target as Element).setPointerCapture?.(event.pointerId);
  });

  ui.view.addEventListener("pointermove", (event) => {
    if (runtime.dragging === null || runtime.channel === null) return;
    const target = dragTarget(event);
    if (target === null) return;
    runtime.channel.dragMove(runtime.dragging.index, target[0], target[1]);
  });

  ui.view.addEventListener("pointerup", () => {
    runtime.dragging = null;
  });

  ui.view.addEventListener("input", (event) => {
    const input = event.target;
    if (!(input instanceof HTMLInputElement) || input.type !== "range") return;
    const target = input.dataset.target;
    if (target !== "control" && target !== "must" && target !== "cannot") return;
    const position = Number(input.value);
    const key = target === "control" ? "mu_cp"
      : target === "must" ? "mu_ml" : "mu_cl";
    runtime.state = setSlider(runtime.state, key, position);
    runtime.channel?.setStrength(target, sliderToStrength(position));
  });

  ui.view.addEventListener("pointerover", (event) => {
    const index = pointIndex(event.target);
    if (index === null) return;
    const doc = runtime.documents[index];
    const coords = runtime.store.coords;
    if (coords === null) return;
    const labels = runtime.clustering?.labels ?? null;
    runtime.detail = {
      index,
      id: doc?.id ?? `#${index}`,
      smiles: typeof doc?.smiles === "string" ? doc.smiles : "",
      fields: doc ?? {},
      clusterLabel: labels === null ? null : labels[index] ?? null,
      structuralKeys: null,
    };
    ui.inspector.innerHTML = renderInspector(runtime.detail, runtime.search);
  });
}

declare global {
  interface Window {
    moledaStart?: typeof startApp;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.moledaStart = startApp;
}
