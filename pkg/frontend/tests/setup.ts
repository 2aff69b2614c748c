// jsdom has no 2D canvas; the heatmap view already guards for a null context,
// so return null quietly instead of logging "not implemented" on every call.
HTMLCanvasElement.prototype.getContext = (() => null) as typeof HTMLCanvasElement.prototype.getContext;

export {};
