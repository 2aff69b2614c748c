// Shared UI state for all four PCA-view components plus the overview panels.
// An empty feature selection means "all features active".

export interface LineDraft {
  anchor: [number, number] | null; // data coordinates in the PC plane
  second: [number, number] | null;
}

export interface UiState {
  revision: number;
  selectedNode: string;
  pcX: number;
  pcY: number;
  featureSelection: string[];
  colorBySelection: boolean;
  overlayOn: boolean;
  pcaFeatures: string[] | null; // subset the current basis was fit on (null = all)
  draft: LineDraft;
}

export function initialState(): UiState {
  return {
    revision: 0,
    selectedNode: "n0",
    pcX: 0,
    pcY: 1,
    featureSelection: [],
    colorBySelection: false,
    overlayOn: false,
    pcaFeatures: null,
    draft: { anchor: null, second: null },
  };
}

export type Listener = (state: UiState) => void;

export class Store {
  private listeners: Listener[] = [];

  constructor(public state: UiState = initialState()) {}

  update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}

export function toggleFeature(store: Store, name: string): void {
  const current = store.state.featureSelection;
  const next = current.includes(name)
    ? current.filter((f) => f !== name)
    : [...current, name];
  store.update({ featureSelection: next });
}

/** A feature is "active" when nothing is selected or it is in the selection. */
export function isFeatureActive(state: UiState, name: string): boolean {
  return state.featureSelection.length === 0 || state.featureSelection.includes(name);
}
