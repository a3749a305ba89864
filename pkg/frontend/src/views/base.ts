import type { AppState, Snapshot } from "../state.js";

export abstract class View {
  constructor(
    protected store: AppState,
    readonly root: HTMLElement,
  ) {
    store.subscribe((s) => this.render(s));
  }

  abstract render(state: Snapshot): void;

  protected el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }
}
