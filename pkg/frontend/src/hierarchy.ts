// Requirement-set tree with drag-to-reparent and a live metrics panel.
// Rejected moves (cycles, unknown parents) surface as a toast and the tree
// reverts to the server's state.

import { Api, ApiError, MetricsReport, RequirementRow } from "./api.js";

export class HierarchyView {
  readonly root: HTMLElement;
  private readonly treeHost: HTMLElement;
  private readonly metricsHost: HTMLElement;
  private readonly toastEl: HTMLElement;
  private rows: RequirementRow[] = [];
  project: string | null = null;
  onSelect: ((row: RequirementRow) => void) | null = null;

  constructor(private readonly api: Api) {
    this.root = document.createElement("section");
    this.root.id = "hierarchy-view";
    this.root.innerHTML = `
      <h2>Hierarchy <span id="project-name" class="muted"></span></h2>
      <div class="toast hidden" id="toast"></div>
      <div class="columns">
        <ul id="tree" class="tree"></ul>
        <div id="metrics-panel" class="metrics"></div>
      </div>`;
    this.treeHost = this.root.querySelector("#tree")!;
    this.metricsHost = this.root.querySelector("#metrics-panel")!;
    this.toastEl = this.root.querySelector("#toast")!;
  }

  async load(project: string): Promise<void> {
    this.project = project;
    this.root.querySelector("#project-name")!.textContent = project;
    const [reqs, report] = await Promise.all([
      this.api.listRequirements(project),
      this.api.metrics(project),
    ]);
    this.rows = reqs.requirements;
    this.renderTree();
    this.renderMetrics(report);
  }

  async refreshMetrics(): Promise<void> {
    if (!this.project) return;
    this.renderMetrics(await this.api.metrics(this.project));
  }

  private renderTree(): void {
    const byParent = new Map<string | null, RequirementRow[]>();
    for (const row of this.rows) {
      const list = byParent.get(row.parent_id) ?? [];
      list.push(row);
      byParent.set(row.parent_id, list);
    }
    const build = (parent: string | null, into: HTMLElement) => {
      for (const row of byParent.get(parent) ?? []) {
        const li = document.createElement("li");
        li.dataset.id = row.id;
        const label = document.createElement("span");
        label.className = "node";
        label.draggable = true;
        label.textContent = row.id;
        if (row.parent_id !== null) {
          const badge = document.createElement("span");
          badge.className = "badge";
          badge.textContent = "child";
          label.appendChild(badge);
        }
        label.title = row.text;
        label.addEventListener("dragstart", (e) => {
          e.dataTransfer?.setData("text/plain", row.id);
        });
        label.addEventListener("dragover", (e) => e.preventDefault());
        label.addEventListener("drop", (e) => {
          e.preventDefault();
          const dragged = e.dataTransfer?.getData("text/plain");
          if (dragged) void this.reparent(dragged, row.id);
        });
        label.addEventListener("click", () => this.onSelect?.(row));
        li.appendChild(label);
        const children = document.createElement("ul");
        build(row.id, children);
        if (children.childElementCount) li.appendChild(children);
        into.appendChild(li);
      }
    };
    this.treeHost.replaceChildren();
    build(null, this.treeHost);
  }

  async reparent(childId: string, parentId: string | null): Promise<void> {
    if (!this.project) return;
    if (childId === parentId) {
      this.toast("a requirement cannot be its own parent");
      return;
    }
    const row = this.rows.find((r) => r.id === childId);
    if (!row) return;
    try {
      await this.api.upsertRequirement(this.project, {
        id: row.id, text: row.text, parent_id: parentId,
        rationale: row.rationale,
      });
    } catch (err) {
      this.toast(err instanceof ApiError ? err.message : String(err));
      await this.load(this.project); // revert to server state
      return;
    }
    await this.load(this.project);
  }

  private renderMetrics(report: MetricsReport): void {
    const dims: Array<[string, Record<string, number>]> = [
      ["scope-option", report.scope],
      ["condition-option", report.condition],
      ["timing-option", report.timing],
    ];
    const table = document.createElement("table");
    for (const [label, counts] of dims) {
      const tr = document.createElement("tr");
      const th = document.createElement("th");
      th.textContent = label;
      const td = document.createElement("td");
      td.textContent = Object.entries(counts)
        .map(([k, v]) => `${k} = ${v}`).join(", ");
      tr.append(th, td);
      table.appendChild(tr);
    }
    const child = document.createElement("tr");
    child.innerHTML = `<th>parent-child</th><td id="child-count">${report.child_count}</td>`;
    const total = document.createElement("tr");
    total.innerHTML = `<th>Total Requirements</th><td id="total-count">${report.total}</td>`;
    table.append(child, total);
    this.metricsHost.replaceChildren(table);
  }

  private toast(message: string): void {
    this.toastEl.textContent = message;
    this.toastEl.classList.remove("hidden");
    setTimeout(() => this.toastEl.classList.add("hidden"), 4000);
  }
}
