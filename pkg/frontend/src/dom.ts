/** Small DOM builders shared by the panels. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function table(headers: string[], rows: (Node | string)[][]): HTMLTableElement {
  const head = el("tr", {});
  for (const h of headers) head.append(el("th", {}, h));
  const body = el("tbody", {});
  for (const cells of rows) {
    const tr = el("tr", {});
    for (const cell of cells) tr.append(el("td", {}, cell));
    body.append(tr);
  }
  const t = el("table", { class: "data" });
  t.append(el("thead", {}, head), body);
  return t;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Numbers shown in the UI come from the service; render them verbatim. */
export function show(value: number | string | null | undefined): string {
  if (value === null || value === undefined) return "-";
  return String(value);
}
