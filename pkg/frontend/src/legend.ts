// Class colors for the choropleth; the label order always comes from the
// server response so the legend can never drift from the engine.

const PALETTE: Record<string, string> = {
  "No Access": "#5c5c66",
  "Very Poor": "#b0392e",
  Poor: "#d97c2b",
  Moderate: "#e8c84d",
  Good: "#9dbf5a",
  "Very Good": "#4f9e63",
  Excellent: "#1e7a4f",
};

export const NO_DATA_COLOR = "#2c2c33";

export function classColor(label: string): string {
  return PALETTE[label] ?? NO_DATA_COLOR;
}

export function renderLegend(container: HTMLElement, labels: string[]): void {
  container.textContent = "";
  const list = document.createElement("ul");
  list.className = "legend-list";
  for (const label of labels) {
    const item = document.createElement("li");
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.backgroundColor = classColor(label);
    const text = document.createElement("span");
    text.className = "legend-label";
    text.textContent = label;
    item.append(swatch, text);
    list.append(item);
  }
  container.append(list);
}
