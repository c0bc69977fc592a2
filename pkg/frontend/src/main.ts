// Application shell: the three panes share one API client and a selected
// project. Clicking a tree node loads its text into the editor and offers
// its past-form monitor to the stepper.

import { Api } from "./api.js";
import { EditorView } from "./editor.js";
import { HierarchyView } from "./hierarchy.js";
import { StepperView } from "./stepper.js";

export function mount(root: HTMLElement, api: Api = new Api()): {
  editor: EditorView; hierarchy: HierarchyView; stepper: StepperView;
} {
  const editor = new EditorView(api);
  const hierarchy = new HierarchyView(api);
  const stepper = new StepperView(api);
  root.replaceChildren(editor.root, hierarchy.root, stepper.root);

  hierarchy.onSelect = (row) => {
    editor.setText(row.text);
    void editor.parseNow();
    if (hierarchy.project) {
      void stepper.start({ requirement_id: row.id, project: hierarchy.project });
    }
  };

  void (async () => {
    try {
      const { projects } = await api.listProjects();
      if (projects.length) await hierarchy.load(projects[0]);
    } catch {
      // no corpus loaded; the editor still works standalone
    }
  })();

  return { editor, hierarchy, stepper };
}

declare global {
  interface Window {
    reqforge?: ReturnType<typeof mount>;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.reqforge = mount(document.getElementById("app")!);
}
