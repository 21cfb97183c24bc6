// App bootstrap: options form + server-authoritative game loop.

import { ApiError, SessionClient } from './client.js';
import { PRESET_INSTANCES, type Role, type SessionView } from './protocol.js';
import { renderBoard } from './render.js';
import { deriveBoard, type MoveButton } from './view.js';

const DEFAULT_API = 'http://127.0.0.1:8642';

interface AppState {
  client: SessionClient;
  view: SessionView | null;
  error: string | null;
  busy: boolean; // at most one in-flight request
}

function getEl<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function setupForm(onStart: (options: Record<string, unknown>, api: string) => void): void {
  const instanceSel = getEl<HTMLSelectElement>('instance');
  for (const name of Object.keys(PRESET_INSTANCES)) {
    const opt = document.createElement('option');
    opt.value = name;
    opt.textContent = name;
    instanceSel.appendChild(opt);
  }
  getEl<HTMLButtonElement>('start').addEventListener('click', () => {
    const role = getEl<HTMLSelectElement>('role').value as Role;
    const opponent = getEl<HTMLSelectElement>('opponent').value;
    const order = Number(getEl<HTMLSelectElement>('order').value) as 1 | 2;
    onStart(
      {
        instance: PRESET_INSTANCES[instanceSel.value] ?? [['A', 'AA']],
        order,
        style: getEl<HTMLSelectElement>('style').value,
        normed: getEl<HTMLInputElement>('normed').checked,
        role,
        opponent,
        oracle: getEl<HTMLInputElement>('oracle').value || undefined,
        seed: Number(getEl<HTMLInputElement>('seed').value || '0'),
      },
      getEl<HTMLInputElement>('api').value || DEFAULT_API,
    );
  });
}

function redraw(state: AppState): void {
  const root = getEl<HTMLDivElement>('game');
  if (!state.view) {
    root.replaceChildren();
    return;
  }
  renderBoard(root, deriveBoard(state.view), {
    onMove: (button: MoveButton) => void submitMove(state, button),
    onUndo: (round: number) => void undoTo(state, round),
  }, state.error);
}

async function submitMove(state: AppState, button: MoveButton): Promise<void> {
  if (!state.view || state.busy || state.view.result) return;
  state.busy = true;
  try {
    const { framed: _framed, ...move } = button.move;
    state.view = await state.client.submitMove(state.view.id, move);
    state.error = null;
  } catch (err) {
    state.error = err instanceof ApiError ? err.reason : String(err);
  } finally {
    state.busy = false;
    redraw(state);
  }
}

async function undoTo(state: AppState, round: number): Promise<void> {
  if (!state.view || state.busy) return;
  state.busy = true;
  try {
    state.view = await state.client.fork(state.view.id, round);
    state.error = null;
  } catch (err) {
    state.error = err instanceof ApiError ? err.reason : String(err);
  } finally {
    state.busy = false;
    redraw(state);
  }
}

function boot(): void {
  const state: AppState = {
    client: new SessionClient(DEFAULT_API),
    view: null,
    error: null,
    busy: false,
  };
  getEl<HTMLInputElement>('api').value = DEFAULT_API;
  setupForm((options, api) => {
    state.client = new SessionClient(api);
    state.busy = true;
    state.client
      .createSession(options as never)
      .then((view) => {
        state.view = view;
        state.error = null;
      })
      .catch((err) => {
        state.error = err instanceof ApiError ? err.reason : String(err);
      })
      .finally(() => {
        state.busy = false;
        redraw(state);
      });
  });
}

boot();
