// Right-click context menus. Thread nodes get the full five options,
// citation contexts only remove/edit/cancel.

export type MenuAction =
  | "insert-child"
  | "remove-subtree"
  | "remove-and-promote"
  | "edit"
  | "cancel";

interface MenuOption {
  label: string;
  action: MenuAction;
}

export const THREAD_MENU_OPTIONS: readonly MenuOption[] = [
  { label: "Insert a new child", action: "insert-child" },
  { label: "Remove this & all its children", action: "remove-subtree" },
  { label: "Remove this", action: "remove-and-promote" },
  { label: "Edit", action: "edit" },
  { label: "Cancel", action: "cancel" },
];

export const CONTEXT_MENU_OPTIONS: readonly MenuOption[] = [
  { label: "Remove this", action: "remove-subtree" },
  { label: "Edit", action: "edit" },
  { label: "Cancel", action: "cancel" },
];

export interface MenuRequest {
  kind: "thread" | "context";
  x: number;
  y: number;
  onAction: (action: MenuAction) => void;
}

let openMenu: HTMLElement | null = null;

export function closeContextMenu(): void {
  openMenu?.remove();
  openMenu = null;
}

/** Open the menu for one node, replacing any menu already open. */
export function openContextMenu(
  doc: Document,
  request: MenuRequest,
): HTMLElement {
  closeContextMenu();
  const options =
    request.kind === "thread" ? THREAD_MENU_OPTIONS : CONTEXT_MENU_OPTIONS;

  const menu = doc.createElement("ul");
  menu.className = "tl-menu";
  menu.style.left = `${request.x}px`;
  menu.style.top = `${request.y}px`;
  for (const option of options) {
    const item = doc.createElement("li");
    item.className = "tl-menu-item";
    item.dataset.action = option.action;
    item.textContent = option.label;
    item.addEventListener("click", () => {
      closeContextMenu();
      if (option.action !== "cancel") request.onAction(option.action);
    });
    menu.appendChild(item);
  }
  doc.body.appendChild(menu);
  openMenu = menu;
  return menu;
}
