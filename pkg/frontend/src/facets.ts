import type { FacetNodePayload } from "./types.js";

/**
 * Nested checkbox sidebar. Unchecking a parent unchecks all of its
 * descendants; re-checking restores them. The exclusion set is the set
 * of unchecked labels, shipped to the server as the `exclude` query
 * parameter.
 */
export function renderFacets(
  root: HTMLElement,
  tree: FacetNodePayload[],
  onChange: (excluded: Set<string>) => void,
): void {
  root.innerHTML = "";
  const list = document.createElement("ul");
  list.className = "facet-list";
  for (const node of tree) {
    list.appendChild(renderNode(node));
  }
  root.appendChild(list);

  // Listen on the freshly created list, not the persistent container:
  // re-renders must not stack handlers.
  list.addEventListener("change", (event) => {
    const box = event.target as HTMLInputElement;
    if (box.type !== "checkbox") return;
    cascade(box);
    onChange(collectExcluded(root));
  });
}

function renderNode(node: FacetNodePayload): HTMLElement {
  const item = document.createElement("li");
  const row = document.createElement("label");
  const box = document.createElement("input");
  box.type = "checkbox";
  box.checked = node.checked;
  box.dataset.label = node.label;
  row.appendChild(box);
  row.appendChild(
    document.createTextNode(` ${node.label} (${node.match_count})`),
  );
  item.appendChild(row);
  if (node.children.length > 0) {
    const children = document.createElement("ul");
    for (const child of node.children) {
      children.appendChild(renderNode(child));
    }
    item.appendChild(children);
  }
  return item;
}

/** Parent toggles sweep the whole subtree; child toggles stand alone. */
function cascade(box: HTMLInputElement): void {
  const item = box.closest("li");
  if (!item) return;
  // ":scope >" keeps the match inside this item's own nested list; a bare
  // "ul input" would also match the box itself through the outer list.
  for (const descendant of item.querySelectorAll<HTMLInputElement>(
    ":scope > ul input[type=checkbox]",
  )) {
    descendant.checked = box.checked;
  }
}

export function collectExcluded(root: HTMLElement): Set<string> {
  const excluded = new Set<string>();
  for (const box of root.querySelectorAll<HTMLInputElement>("input[type=checkbox]")) {
    if (!box.checked && box.dataset.label) {
      excluded.add(box.dataset.label);
    }
  }
  return excluded;
}
