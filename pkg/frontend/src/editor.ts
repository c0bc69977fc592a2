// Live requirement editor: debounced parsing with revision-guarded rendering,
// field-colored text, template key, both logic forms, and the timeline.

import { Api, ParseOk, ParseIssue, Span } from "./api.js";
import { renderDiagram } from "./diagram.js";
import { debounce, RevisionGate } from "./state.js";

const FIELD_ORDER = ["scope", "condition", "component", "shall", "timing",
  "response"] as const;

export function highlightFields(text: string,
                                spans: Record<string, Span>): DocumentFragment {
  const frag = document.createDocumentFragment();
  let cursor = 0;
  for (const field of FIELD_ORDER) {
    const span = spans[field];
    if (!span) continue;
    const [start, end] = span;
    if (start > cursor) {
      frag.appendChild(document.createTextNode(text.slice(cursor, start)));
    }
    const mark = document.createElement("span");
    mark.className = `field field-${field}`;
    mark.textContent = text.slice(start, end);
    frag.appendChild(mark);
    cursor = end;
  }
  if (cursor < text.length) {
    frag.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return frag;
}

export function inlineDiagnostic(text: string, issue: ParseIssue): DocumentFragment {
  const frag = document.createDocumentFragment();
  const at = Math.min(issue.offset, text.length);
  frag.appendChild(document.createTextNode(text.slice(0, at)));
  const caret = document.createElement("span");
  caret.className = "diagnostic";
  caret.textContent = text.slice(at) || " ";
  caret.title = `${issue.line}:${issue.col}: ${issue.message}`;
  frag.appendChild(caret);
  return frag;
}

export class EditorView {
  readonly root: HTMLElement;
  private readonly gate = new RevisionGate();
  private readonly input: HTMLTextAreaElement;
  private readonly highlighted: HTMLElement;
  private readonly keyEl: HTMLElement;
  private readonly futureEl: HTMLElement;
  private readonly pastEl: HTMLElement;
  private readonly diagramHost: HTMLElement;
  private readonly errorEl: HTMLElement;
  private readonly rewriteEl: HTMLElement;
  private readonly offlineEl: HTMLElement;
  lastParse: ParseOk | null = null;

  constructor(private readonly api: Api, debounceMs = 300) {
    this.root = document.createElement("section");
    this.root.id = "editor-view";
    this.root.innerHTML = `
      <h2>Requirement</h2>
      <div class="banner hidden" id="offline-banner">service unreachable</div>
      <textarea id="req-input" rows="3" spellcheck="false"
        placeholder="in mode when condition Component shall timing response"></textarea>
      <div id="req-highlight" class="highlight" aria-live="polite"></div>
      <div id="req-error" class="error hidden"></div>
      <div class="banner hidden" id="rewrite-banner"></div>
      <dl class="facts">
        <dt>template key</dt><dd id="template-key">—</dd>
        <dt>future form</dt><dd id="future-ltl">—</dd>
        <dt>past form</dt><dd id="past-ltl">—</dd>
      </dl>
      <div id="diagram-host"></div>`;
    this.input = this.root.querySelector("#req-input")!;
    this.highlighted = this.root.querySelector("#req-highlight")!;
    this.keyEl = this.root.querySelector("#template-key")!;
    this.futureEl = this.root.querySelector("#future-ltl")!;
    this.pastEl = this.root.querySelector("#past-ltl")!;
    this.diagramHost = this.root.querySelector("#diagram-host")!;
    this.errorEl = this.root.querySelector("#req-error")!;
    this.rewriteEl = this.root.querySelector("#rewrite-banner")!;
    this.offlineEl = this.root.querySelector("#offline-banner")!;

    const trigger = debounce(() => void this.parseNow(), debounceMs);
    this.input.addEventListener("input", trigger);
  }

  setText(text: string): void {
    this.input.value = text;
  }

  get text(): string {
    return this.input.value;
  }

  /** Parse the current text; stale responses are discarded by revision. */
  async parseNow(): Promise<void> {
    const text = this.input.value;
    if (!text.trim()) {
      this.clear();
      return;
    }
    const revision = this.gate.next();
    let result;
    try {
      result = await this.api.parse(text, revision);
    } catch {
      this.offlineEl.classList.remove("hidden");
      return;
    }
    this.offlineEl.classList.add("hidden");
    if (!this.gate.isCurrent(result.body.revision)) return; // stale
    if (result.ok) {
      this.render(text, result.body);
    } else {
      this.renderError(text, result.body.errors[0]);
    }
  }

  private clear(): void {
    this.lastParse = null;
    this.highlighted.textContent = "";
    this.keyEl.textContent = "—";
    this.futureEl.textContent = "—";
    this.pastEl.textContent = "—";
    this.diagramHost.textContent = "";
    this.errorEl.classList.add("hidden");
    this.rewriteEl.classList.add("hidden");
  }

  private render(text: string, body: ParseOk): void {
    this.lastParse = body;
    this.errorEl.classList.add("hidden");
    this.highlighted.replaceChildren(highlightFields(text, body.spans));
    const k = body.template_key;
    this.keyEl.textContent = `(${k.scope},${k.condition},${k.timing})`;
    this.futureEl.textContent = body.future_ltl;
    this.pastEl.textContent =
      body.past_ltl ?? `— (${body.past_omitted_reason ?? "unsupported"})`;
    this.diagramHost.replaceChildren(renderDiagram(body.diagram));
    if (body.never_rewrite) {
      const { text: rewritten } = body.never_rewrite;
      this.rewriteEl.replaceChildren();
      this.rewriteEl.append(`never-timing can be written as: ${rewritten} `);
      const apply = document.createElement("button");
      apply.id = "apply-rewrite";
      apply.textContent = "apply";
      apply.addEventListener("click", () => {
        this.input.value = rewritten;
        void this.parseNow();
      });
      this.rewriteEl.appendChild(apply);
      this.rewriteEl.classList.remove("hidden");
    } else {
      this.rewriteEl.classList.add("hidden");
    }
  }

  private renderError(text: string, issue: ParseIssue): void {
    this.lastParse = null;
    this.highlighted.replaceChildren(inlineDiagnostic(text, issue));
    this.errorEl.textContent = `${issue.line}:${issue.col}: ${issue.message}`;
    this.errorEl.classList.remove("hidden");
    this.keyEl.textContent = "—";
    this.futureEl.textContent = "—";
    this.pastEl.textContent = "—";
    this.diagramHost.textContent = "";
    this.rewriteEl.classList.add("hidden");
  }
}
