// Application shell: owns the shared UI state, fetches every layout from the
// session service, and wires the four linked views together. All analytics
// stay on the server; this file only routes data and DOM events.

import {
  Api,
  ApiError,
  type HeatmapRecord,
  type OverlayRecord,
  type ProjectionRecord,
  type SurvivalRecord,
  type TreeRecord,
} from "./api.js";
import { isFeatureActive, Store, toggleFeature } from "./state.js";
import { renderBinned } from "./views/binned.js";
import { renderHeatmap } from "./views/heatmap.js";
import { renderLoadings } from "./views/loadings.js";
import { draftLine, renderProjection } from "./views/projection.js";
import { renderSankey } from "./views/sankey.js";
import { renderSurvival } from "./views/survival.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgIn(parent: HTMLElement, cls: string): SVGSVGElement {
  const el = document.createElementNS(SVG_NS, "svg");
  el.setAttribute("class", cls);
  parent.appendChild(el);
  return el;
}

function bump(el: Element): void {
  const count = Number(el.getAttribute("data-renders") ?? "0") + 1;
  el.setAttribute("data-renders", String(count));
}

export class App {
  store = new Store();
  private tree: TreeRecord | null = null;
  private heatmapData: HeatmapRecord | null = null;
  private survivalData: SurvivalRecord | null = null;
  private overlayData: OverlayRecord | null = null;
  private projectionData: ProjectionRecord | null = null;

  private els!: {
    toolbar: HTMLElement;
    status: HTMLElement;
    confirm: HTMLButtonElement;
    overlayToggle: HTMLButtonElement;
    colorToggle: HTMLButtonElement;
    runPca: HTMLButtonElement;
    clearSelection: HTMLButtonElement;
    pruneButton: HTMLButtonElement;
    sankey: SVGSVGElement;
    heatmapHeader: SVGSVGElement;
    heatmapCanvas: HTMLCanvasElement;
    heatmapRows: SVGSVGElement;
    survival: SVGSVGElement;
    projection: SVGSVGElement;
    binsX: SVGSVGElement;
    binsY: SVGSVGElement;
    loadings: SVGSVGElement;
    panels: Record<string, HTMLElement>;
  };

  constructor(
    private root: HTMLElement,
    private api: Api,
  ) {}

  async init(): Promise<void> {
    this.buildScaffold();
    try {
      await this.refreshAll();
    } catch (error) {
      if (error instanceof ApiError && error.errorName === "NoDataset") {
        this.renderUploadPanel();
        return;
      }
      throw error;
    }
  }

  // --- scaffold -------------------------------------------------------------

  private buildScaffold(): void {
    this.root.innerHTML = "";
    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const mkButton = (id: string, text: string): HTMLButtonElement => {
      const b = document.createElement("button");
      b.id = id;
      b.textContent = text;
      toolbar.appendChild(b);
      return b;
    };
    const confirm = mkButton("confirm-split", "confirm split");
    confirm.disabled = true;
    const pruneButton = mkButton("prune-node", "prune selected");
    const overlayToggle = mkButton("overlay-toggle", "overlay labels");
    const colorToggle = mkButton("color-toggle", "color by selection");
    const runPca = mkButton("run-pca", "run PCA on selection");
    const clearSelection = mkButton("clear-selection", "clear selection");
    const exportLink = document.createElement("a");
    exportLink.id = "export-model";
    exportLink.textContent = "export model";
    exportLink.href = this.api.exportUrl();
    exportLink.setAttribute("download", "model.json");
    toolbar.appendChild(exportLink);
    const status = document.createElement("span");
    status.className = "status";
    toolbar.appendChild(status);
    this.root.appendChild(toolbar);

    const grid = document.createElement("div");
    grid.className = "grid";
    this.root.appendChild(grid);
    const panel = (title: string, cls: string): HTMLElement => {
      const box = document.createElement("div");
      box.className = `panel ${cls}`;
      const h = document.createElement("h3");
      h.textContent = title;
      box.appendChild(h);
      grid.appendChild(box);
      return box;
    };

    const sankeyPanel = panel("Hierarchy", "panel-sankey");
    const heatmapPanel = panel("Heatmap overview", "panel-heatmap");
    const survivalPanel = panel("Survival", "panel-survival");
    const pcaPanel = panel("PCA view", "panel-pca");

    const sankey = svgIn(sankeyPanel, "sankey");

    const heatmapHeader = svgIn(heatmapPanel, "heatmap-header");
    const heatmapCanvas = document.createElement("canvas");
    heatmapCanvas.className = "heatmap-cells";
    heatmapPanel.appendChild(heatmapCanvas);
    const heatmapRows = svgIn(heatmapPanel, "heatmap-rows");

    const survival = svgIn(survivalPanel, "survival");

    const pcaGrid = document.createElement("div");
    pcaGrid.className = "pca-grid";
    pcaPanel.appendChild(pcaGrid);
    const cell = (cls: string): HTMLElement => {
      const d = document.createElement("div");
      d.className = cls;
      pcaGrid.appendChild(d);
      return d;
    };
    const projectionCell = cell("projection");
    const binsYCell = cell("bins-y");
    const binsXCell = cell("bins-x");
    const loadingsCell = cell("loadings");

    this.els = {
      toolbar,
      status,
      confirm,
      overlayToggle,
      colorToggle,
      runPca,
      clearSelection,
      pruneButton,
      sankey,
      heatmapHeader,
      heatmapCanvas,
      heatmapRows,
      survival,
      projection: svgIn(projectionCell, "projection-svg"),
      binsX: svgIn(binsXCell, "bins-x-svg"),
      binsY: svgIn(binsYCell, "bins-y-svg"),
      loadings: svgIn(loadingsCell, "loadings-svg"),
      panels: {
        sankey: sankeyPanel,
        heatmap: heatmapPanel,
        survival: survivalPanel,
        projection: projectionCell,
        binsX: binsXCell,
        binsY: binsYCell,
        loadings: loadingsCell,
      },
    };

    confirm.addEventListener("click", () => void this.confirmSplit());
    pruneButton.addEventListener("click", () => void this.pruneSelected());
    overlayToggle.addEventListener("click", () => this.toggleOverlay());
    colorToggle.addEventListener("click", () => void this.toggleColorBySelection());
    runPca.addEventListener("click", () => void this.runPcaOnSelection());
    clearSelection.addEventListener("click", () => void this.setSelection([]));
  }

  private renderUploadPanel(): void {
    const panel = document.createElement("div");
    panel.className = "panel upload-panel";
    panel.innerHTML = `
      <h3>Load a dataset</h3>
      <label>Expression file <input type="file" id="expression-file" /></label>
      <label>Clinical file (optional) <input type="file" id="clinical-file" /></label>
      <label>Orientation
        <select id="orientation">
          <option value="samples-as-rows">samples as rows</option>
          <option value="features-as-rows">features as rows</option>
        </select>
      </label>
      <label><input type="checkbox" id="zscore" /> z-score normalize</label>
      <label><input type="checkbox" id="impute-mean" /> impute missing cells with feature means</label>
      <button id="upload-submit">load</button>
      <div class="hint" id="upload-hint"></div>
    `;
    this.root.appendChild(panel);
    const submit = panel.querySelector<HTMLButtonElement>("#upload-submit")!;
    submit.addEventListener("click", () => {
      void (async () => {
        const expression = panel.querySelector<HTMLInputElement>("#expression-file")!.files?.[0];
        if (!expression) return;
        const form = new FormData();
        form.set("expression", expression);
        const clinical = panel.querySelector<HTMLInputElement>("#clinical-file")!.files?.[0];
        if (clinical) form.set("clinical", clinical);
        form.set("orientation", panel.querySelector<HTMLSelectElement>("#orientation")!.value);
        form.set("zscore", String(panel.querySelector<HTMLInputElement>("#zscore")!.checked));
        form.set("impute_mean", String(panel.querySelector<HTMLInputElement>("#impute-mean")!.checked));
        try {
          const summary = await this.api.uploadDataset(form);
          this.store.update({ revision: summary.revision });
          panel.remove();
          await this.refreshAll();
        } catch (error) {
          panel.querySelector("#upload-hint")!.textContent = String(error);
        }
      })();
    });
  }

  // --- data flow --------------------------------------------------------------

  async refreshAll(): Promise<void> {
    const tree = await this.api.tree();
    this.tree = tree;
    this.store.update({ revision: tree.revision });
    if (!tree.nodes.some((n) => n.id === this.store.state.selectedNode)) {
      this.store.update({ selectedNode: tree.nodes[0].id, pcaFeatures: null });
    }

    this.heatmapData = await this.api.heatmap();
    try {
      this.survivalData = await this.api.survival();
    } catch {
      this.survivalData = null; // no clinical data loaded
    }
    try {
      this.overlayData = await this.api.overlay();
    } catch {
      this.overlayData = null; // overlay disabled without prior labels
    }
    this.renderOverviewPanels();
    await this.refreshProjection();
    this.renderToolbar();
  }

  async refreshProjection(): Promise<void> {
    const state = this.store.state;
    const colorFeatures =
      state.colorBySelection && state.featureSelection.length ? state.featureSelection : null;
    this.projectionData = await this.api.projection(state.selectedNode, {
      pcx: state.pcX,
      pcy: state.pcY,
      features: state.pcaFeatures,
      colorFeatures,
    });
    this.renderPcaViews();
  }

  // --- rendering ----------------------------------------------------------------

  private renderOverviewPanels(): void {
    if (this.tree) {
      renderSankey(this.els.sankey, this.tree, this.store.state.selectedNode, {
        onSelect: (id) => void this.selectNode(id),
      });
      bump(this.els.panels.sankey);
    }
    if (this.heatmapData) {
      renderHeatmap(
        { header: this.els.heatmapHeader, canvas: this.els.heatmapCanvas, rows: this.els.heatmapRows },
        this.heatmapData,
      );
      bump(this.els.panels.heatmap);
    }
    if (this.survivalData) {
      renderSurvival(this.els.survival, this.survivalData);
      bump(this.els.panels.survival);
    }
  }

  renderPcaViews(): void {
    const record = this.projectionData;
    if (!record) return;
    const state = this.store.state;
    renderProjection(this.els.projection, record, state, this.overlayData, {
      onPlaneClick: (point) => this.planeClick(point),
    });
    bump(this.els.panels.projection);
    renderBinned(this.els.binsX, record.bins_x, state, record.cmax, {
      onFeatureClick: (f) => void this.featureClicked(f),
    });
    bump(this.els.panels.binsX);
    renderBinned(this.els.binsY, record.bins_y, state, record.cmax, {
      onFeatureClick: (f) => void this.featureClicked(f),
    });
    bump(this.els.panels.binsY);
    renderLoadings(this.els.loadings, record.loadings, state, {
      onFeatureClick: (f) => void this.featureClicked(f),
      onBrush: (features) => void this.setSelection(features),
    });
    bump(this.els.panels.loadings);
    this.renderToolbar();
  }

  private renderToolbar(): void {
    const state = this.store.state;
    this.els.confirm.disabled = draftLine(state.draft) === null;
    this.els.overlayToggle.disabled = this.overlayData === null;
    this.els.overlayToggle.title =
      this.overlayData === null ? "no prior labels in the loaded dataset" : "";
    this.els.overlayToggle.classList.toggle("on", state.overlayOn);
    this.els.colorToggle.classList.toggle("on", state.colorBySelection);
    this.els.status.textContent = `node ${state.selectedNode} | revision ${state.revision}` +
      (state.featureSelection.length ? ` | ${state.featureSelection.length} features selected` : "");
  }

  setStatus(message: string): void {
    this.els.status.textContent = message;
  }

  // --- interactions ----------------------------------------------------------------

  async selectNode(id: string): Promise<void> {
    this.store.update({ selectedNode: id, draft: { anchor: null, second: null }, pcaFeatures: null });
    if (this.tree) renderSankey(this.els.sankey, this.tree, id, { onSelect: (n) => void this.selectNode(n) });
    await this.refreshProjection();
  }

  planeClick(point: [number, number]): void {
    const { anchor, second } = this.store.state.draft;
    if (!anchor) {
      this.store.update({ draft: { anchor: point, second: null } });
    } else if (!second) {
      if (point[0] === anchor[0] && point[1] === anchor[1]) return; // need a direction
      this.store.update({ draft: { anchor, second: point } });
    } else {
      this.store.update({ draft: { anchor: point, second: null } });
    }
    this.renderPcaViews();
  }

  async confirmSplit(): Promise<void> {
    const state = this.store.state;
    const line = draftLine(state.draft);
    if (!line || !this.projectionData) return;
    try {
      await this.api.split(state.selectedNode, {
        pcx: state.pcX,
        pcy: state.pcY,
        features: state.pcaFeatures,
        line,
        revision: state.revision,
      });
      this.store.update({ draft: { anchor: null, second: null } });
      await this.refreshAll();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // someone else mutated the session: refresh layouts, drop the pending
        // intent, and let the user re-confirm on current data
        this.store.update({ draft: { anchor: null, second: null } });
        await this.refreshAll();
        this.setStatus("session changed underneath you; split not applied");
        return;
      }
      this.setStatus(error instanceof Error ? error.message : String(error));
    }
  }

  async pruneSelected(): Promise<void> {
    const state = this.store.state;
    try {
      await this.api.prune(state.selectedNode, state.revision);
      await this.refreshAll();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refreshAll();
        this.setStatus("session changed underneath you; prune not applied");
        return;
      }
      this.setStatus(error instanceof Error ? error.message : String(error));
    }
  }

  async featureClicked(feature: string): Promise<void> {
    toggleFeature(this.store, feature);
    await this.afterSelectionChange();
  }

  async setSelection(features: string[]): Promise<void> {
    this.store.update({ featureSelection: features });
    await this.afterSelectionChange();
  }

  private async afterSelectionChange(): Promise<void> {
    const state = this.store.state;
    if (state.colorBySelection) {
      await this.refreshProjection(); // colors are computed server-side
    } else {
      this.renderPcaViews();
    }
  }

  async toggleColorBySelection(): Promise<void> {
    this.store.update({ colorBySelection: !this.store.state.colorBySelection });
    await this.refreshProjection();
  }

  toggleOverlay(): void {
    if (!this.overlayData) return;
    this.store.update({ overlayOn: !this.store.state.overlayOn });
    this.renderPcaViews();
  }

  async runPcaOnSelection(): Promise<void> {
    const selection = this.store.state.featureSelection;
    this.store.update({
      pcaFeatures: selection.length ? [...selection] : null,
      draft: { anchor: null, second: null },
    });
    await this.refreshProjection();
  }

  /** Active-state helper exposed for tests. */
  featureActive(name: string): boolean {
    return isFeatureActive(this.store.state, name);
  }
}
