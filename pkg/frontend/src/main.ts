import { ApiClient } from "./api.js";
import { AppState } from "./state.js";
import { ConceptsView } from "./views/concepts.js";
import { DocumentsView } from "./views/documents.js";
import { RuleEditorView } from "./views/editor.js";
import { OverviewView } from "./views/overview.js";
import { ProjectionView } from "./views/projection.js";
import { RuleListView } from "./views/rules.js";
import { StatsView } from "./views/stats.js";

/** Wire the seven linked views to the store and kick off the initial load,
 * polling until server-side discovery finishes. */
export function boot(doc: Document = document): AppState {
  const store = new AppState(new ApiClient(""));
  const mount = (id: string) => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing mount point #${id}`);
    return el as HTMLElement;
  };

  new OverviewView(store, mount("overview-view"));
  new RuleListView(store, mount("rules-view"));
  new ProjectionView(store, mount("projection-view"));
  new StatsView(store, mount("stats-view"));
  new DocumentsView(store, mount("documents-view"));
  new RuleEditorView(store, mount("editor-view"));
  new ConceptsView(store, mount("concepts-view"));

  void store.init().then(async () => {
    await store.refreshConcepts();
    while (store.state.summary && store.state.summary.discovery_state === "running") {
      await new Promise((r) => setTimeout(r, 1500));
      const status = await store.api.discoveryStatus();
      if (status.state !== "running") {
        await store.init();
        break;
      }
    }
  });
  return store;
}

if (typeof document !== "undefined" && document.getElementById("overview-view")) {
  boot();
}
