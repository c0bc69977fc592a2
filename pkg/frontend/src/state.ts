// Small view-state helpers: debouncing and revision-guarded rendering.

/** Debounce calls; only the trailing invocation inside the window fires. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void, waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}

/**
 * Monotonic revision counter guarding against stale responses: a response
 * tagged with revision r is rendered only while r is still current.
 */
export class RevisionGate {
  private current = 0;

  next(): number {
    return ++this.current;
  }

  isCurrent(revision: number | null): boolean {
    return revision === this.current;
  }
}

export const VERDICT_COLORS: Record<string, string> = {
  True: "#1a7f37",
  False: "#c62828",
  PresumablyTrue: "#a5d6a7",
  PresumablyFalse: "#ef9a9a",
};

export const VERDICT_GLYPHS: Record<string, string> = {
  True: "⊤",
  False: "⊥",
  PresumablyTrue: "?⊤",
  PresumablyFalse: "?⊥",
};
