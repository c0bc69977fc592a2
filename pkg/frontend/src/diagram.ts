// Renders the service's symbolic timeline segments as an SVG strip.
// Markers are laid out on a nominal axis; bound-<n> markers are spaced by
// order of appearance, not to scale (the labels carry the numbers).

import type { DiagramSegment } from "./api.js";

const KIND_COLORS: Record<string, string> = {
  "scope-active": "#90caf9",
  "condition-trigger": "#ffb74d",
  "response-window": "#81c784",
};

const BASE_ORDER = ["trace-start", "mode-entry", "trigger", "bound",
  "condition-exit", "mode-exit", "trace-end"];

export function markerPositions(segments: DiagramSegment[]): Map<string, number> {
  const markers: string[] = [];
  const push = (m: string) => {
    if (!markers.includes(m)) markers.push(m);
  };
  push("trace-start");
  const rank = (m: string) =>
    BASE_ORDER.indexOf(m.startsWith("bound-") ? "bound" : m);
  const all = segments.flatMap((s) => [s.start, s.end]);
  all.sort((a, b) => rank(a) - rank(b));
  for (const m of all) push(m);
  push("trace-end");
  const out = new Map<string, number>();
  const step = 1 / Math.max(markers.length - 1, 1);
  markers.forEach((m, i) => out.set(m, i * step));
  return out;
}

export function renderDiagram(segments: DiagramSegment[], width = 640): SVGSVGElement {
  const svgNS = "http://www.w3.org/2000/svg";
  const rowHeight = 26;
  const pad = 70;
  const axisY = segments.length * rowHeight + 18;
  const svg = document.createElementNS(svgNS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(axisY + 34));
  svg.setAttribute("class", "diagram");

  const positions = markerPositions(segments);
  const xOf = (marker: string) =>
    pad + (positions.get(marker) ?? 0) * (width - 2 * pad);

  segments.forEach((seg, row) => {
    const y = 8 + row * rowHeight;
    const x1 = xOf(seg.start);
    const x2 = Math.max(xOf(seg.end), x1 + 6);
    const rect = document.createElementNS(svgNS, "rect");
    rect.setAttribute("x", String(x1));
    rect.setAttribute("y", String(y));
    rect.setAttribute("width", String(x2 - x1));
    rect.setAttribute("height", "16");
    rect.setAttribute("rx", "4");
    rect.setAttribute("fill", KIND_COLORS[seg.kind] ?? "#ccc");
    rect.setAttribute("data-kind", seg.kind);
    svg.appendChild(rect);
    const label = document.createElementNS(svgNS, "text");
    label.setAttribute("x", "4");
    label.setAttribute("y", String(y + 12));
    label.setAttribute("class", "diagram-label");
    label.textContent = seg.label;
    svg.appendChild(label);
  });

  const axis = document.createElementNS(svgNS, "line");
  axis.setAttribute("x1", String(pad));
  axis.setAttribute("x2", String(width - pad));
  axis.setAttribute("y1", String(axisY));
  axis.setAttribute("y2", String(axisY));
  axis.setAttribute("stroke", "#555");
  svg.appendChild(axis);

  for (const [marker, frac] of positions) {
    const x = pad + frac * (width - 2 * pad);
    const tick = document.createElementNS(svgNS, "line");
    tick.setAttribute("x1", String(x));
    tick.setAttribute("x2", String(x));
    tick.setAttribute("y1", String(axisY - 4));
    tick.setAttribute("y2", String(axisY + 4));
    tick.setAttribute("stroke", "#555");
    svg.appendChild(tick);
    const text = document.createElementNS(svgNS, "text");
    text.setAttribute("x", String(x));
    text.setAttribute("y", String(axisY + 18));
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("class", "diagram-marker");
    text.textContent = marker;
    svg.appendChild(text);
  }
  return svg;
}
