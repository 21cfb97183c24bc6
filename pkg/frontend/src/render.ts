// DOM rendering of a BoardModel. Plain elements, no framework.

import type { BoardModel, ColumnModel, MoveButton } from './view.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderColumn(title: string, column: ColumnModel): HTMLElement {
  const box = el('div', 'side');
  box.appendChild(el('h3', 'side-title', title));
  box.appendChild(el('div', 'control', column.control));
  if (column.empty) {
    box.appendChild(el('div', 'stack empty-config', '(no stacks)'));
    return box;
  }
  for (const stack of column.stacks) {
    const row = el('div', 'stack');
    for (const sym of stack.symbols) {
      row.appendChild(el('span', 'symbol', sym));
    }
    box.appendChild(row);
  }
  return box;
}

export interface RenderCallbacks {
  onMove(button: MoveButton): void;
  onUndo(round: number): void;
}

export function renderBoard(
  root: HTMLElement,
  board: BoardModel,
  callbacks: RenderCallbacks,
  error: string | null,
): void {
  root.replaceChildren();

  const status = el('div', 'status');
  status.appendChild(el('span', 'phase-badge', board.phase));
  status.appendChild(el('span', 'round', `round ${board.round}`));
  status.appendChild(el('span', 'status-line', board.statusLine));
  root.appendChild(status);

  if (board.banner) {
    root.appendChild(el('div', board.finished ? 'banner final' : 'banner hint', board.banner));
  }
  if (error) {
    root.appendChild(el('div', 'banner error', `illegal move: ${error}`));
  }

  const columns = el('div', 'board' + (board.equal ? ' equal' : ''));
  columns.appendChild(renderColumn('left', board.left));
  columns.appendChild(renderColumn('right', board.right));
  root.appendChild(columns);

  if (board.pendingLabel) {
    root.appendChild(el('div', 'pending', `pending attack: ${board.pendingLabel}`));
  }

  const moves = el('div', 'moves');
  if (board.waitingForEngine) {
    moves.appendChild(el('em', undefined, 'waiting for the engine...'));
  }
  for (const button of board.moves) {
    const b = el('button', 'move' + (button.framed ? ' framed' : ''), button.label);
    if (button.framed) {
      b.appendChild(el('span', 'framed-badge', 'framed'));
      b.title = 'forcing-gadget move: the opponent can answer into an equal pair';
    }
    b.disabled = board.finished;
    b.addEventListener('click', () => callbacks.onMove(button));
    moves.appendChild(b);
  }
  root.appendChild(moves);

  const history = el('div', 'history');
  history.appendChild(el('h3', undefined, 'history'));
  const list = el('ol');
  for (const row of board.history) {
    const item = el('li');
    item.appendChild(el('span', 'hist-attack', row.attack));
    item.appendChild(el('span', 'hist-response', ` / ${row.response} `));
    const undo = el('button', 'undo', `undo to ${row.round - 1}`);
    undo.addEventListener('click', () => callbacks.onUndo(row.round - 1));
    item.appendChild(undo);
    list.appendChild(item);
  }
  history.appendChild(list);
  root.appendChild(history);
}
