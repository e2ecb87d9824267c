// DOM construction and refresh for the three-panel communication task:
// target rendering, clickable scratch grid, live robot guess.

import { GRID, SYMBOL_CHARS, SYMBOL_NAMES, UiSessionState, cellKey } from './state.js';

export interface Handlers {
  onCellClick: (x: number, y: number) => void;
  onUndo: () => void;
  onRobotSwitch: (listener: 'l0' | 'l1' | 'lp') => void;
  onNextTask: () => void;
  onRetry: () => void;
}

const ROBOT_LABELS: Record<string, string> = {
  l0: 'white robot (literal)',
  l1: 'blue robot (pragmatic)',
  lp: 'prior robot (crafted)',
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function buildGrid(doc: Document, kind: string, clickable: boolean,
                   handlers: Handlers): HTMLElement {
  const grid = el(doc, 'div', `grid grid-${kind}`);
  grid.setAttribute('data-grid', kind);
  for (let y = 0; y < GRID; y++) {
    for (let x = 0; x < GRID; x++) {
      const cell = el(doc, 'button', 'cell sym-none');
      cell.setAttribute('data-cell', cellKey(x, y));
      cell.type = 'button';
      if (clickable) {
        cell.addEventListener('click', () => handlers.onCellClick(x, y));
      } else {
        cell.disabled = true;
      }
      grid.appendChild(cell);
    }
  }
  return grid;
}

export function buildApp(root: HTMLElement, handlers: Handlers): void {
  const doc = root.ownerDocument;
  root.innerHTML = '';

  const banner = el(doc, 'div', 'banner hidden');
  banner.setAttribute('data-role', 'fatal-banner');
  const retry = el(doc, 'button', 'retry', 'retry');
  retry.setAttribute('data-role', 'retry');
  retry.addEventListener('click', () => handlers.onRetry());
  banner.appendChild(el(doc, 'span', 'banner-text'));
  banner.appendChild(retry);
  root.appendChild(banner);

  const robots = el(doc, 'div', 'robot-switch');
  for (const kind of ['l0', 'l1', 'lp'] as const) {
    const button = el(doc, 'button', `robot robot-${kind}`, ROBOT_LABELS[kind]);
    button.setAttribute('data-robot', kind);
    button.addEventListener('click', () => handlers.onRobotSwitch(kind));
    robots.appendChild(button);
  }
  root.appendChild(robots);

  const panels = el(doc, 'div', 'panels');
  for (const [kind, title, clickable] of
       [['target', 'make this pattern', false],
        ['scratch', 'your examples', true],
        ['guess', 'robot guess', false]] as const) {
    const panel = el(doc, 'section', `panel panel-${kind}`);
    panel.appendChild(el(doc, 'h2', 'panel-title', title));
    panel.appendChild(buildGrid(doc, kind, clickable, handlers));
    panels.appendChild(panel);
  }
  root.appendChild(panels);

  const palette = el(doc, 'div', 'palette');
  SYMBOL_NAMES.forEach((name, code) => {
    const button = el(doc, 'button', `swatch sym-${code}`, name);
    button.setAttribute('data-symbol', String(code));
    button.addEventListener('click', () => {
      palette.querySelectorAll('.swatch').forEach(b => b.classList.remove('selected'));
      button.classList.add('selected');
      palette.setAttribute('data-selected', String(code));
    });
    palette.appendChild(button);
  });
  palette.setAttribute('data-selected', '0');
  root.appendChild(palette);

  const controls = el(doc, 'div', 'controls');
  const undo = el(doc, 'button', 'undo', 'undo');
  undo.setAttribute('data-role', 'undo');
  undo.addEventListener('click', () => handlers.onUndo());
  controls.appendChild(undo);
  controls.appendChild(el(doc, 'span', 'moves'));
  controls.appendChild(el(doc, 'span', 'consistent'));
  controls.appendChild(el(doc, 'span', 'inline-error'));
  root.appendChild(controls);

  const success = el(doc, 'div', 'success hidden');
  success.setAttribute('data-role', 'success-banner');
  success.appendChild(el(doc, 'span', 'success-text', 'pattern recreated!'));
  const next = el(doc, 'button', 'next-task', 'next task');
  next.setAttribute('data-role', 'next-task');
  next.addEventListener('click', () => handlers.onNextTask());
  success.appendChild(next);
  root.appendChild(success);
}

function paintGrid(root: HTMLElement, kind: string, pattern: string | null): void {
  const grid = root.querySelector(`[data-grid="${kind}"]`)!;
  const rows = pattern ? pattern.split('\n') : null;
  for (let y = 0; y < GRID; y++) {
    for (let x = 0; x < GRID; x++) {
      const cell = grid.querySelector(`[data-cell="${cellKey(x, y)}"]`)!;
      const code = rows ? SYMBOL_CHARS.indexOf(rows[y][x]) : -1;
      cell.className = code >= 0 ? `cell sym-${code}` : 'cell sym-none';
      cell.textContent = code >= 0 ? SYMBOL_CHARS[code] : '';
    }
  }
}

export function refresh(root: HTMLElement, state: UiSessionState): void {
  paintGrid(root, 'target', state.target);
  paintGrid(root, 'guess', state.guess);

  const scratch = root.querySelector('[data-grid="scratch"]')!;
  for (let y = 0; y < GRID; y++) {
    for (let x = 0; x < GRID; x++) {
      const cell = scratch.querySelector(`[data-cell="${cellKey(x, y)}"]`)!;
      const code = state.placed.get(cellKey(x, y));
      const pending = state.pending && state.pending.x === x && state.pending.y === y;
      cell.className = code === undefined ? 'cell sym-none' : `cell sym-${code} placed`;
      if (pending) cell.classList.add('pending');
      cell.textContent = code === undefined ? '' : SYMBOL_CHARS[code];
    }
  }

  root.querySelectorAll('.robot').forEach(b => b.classList.remove('active'));
  root.querySelector(`[data-robot="${state.listener}"]`)?.classList.add('active');

  (root.querySelector('.moves') as HTMLElement).textContent = `moves: ${state.moves}`;
  (root.querySelector('.consistent') as HTMLElement).textContent =
    `consistent programs: ${state.nConsistent}`;
  (root.querySelector('.inline-error') as HTMLElement).textContent = state.lastError ?? '';
  root.querySelector('[data-role="success-banner"]')!
    .classList.toggle('hidden', !state.solved);
}

export function showFatal(root: HTMLElement, message: string): void {
  const banner = root.querySelector('[data-role="fatal-banner"]')!;
  banner.classList.remove('hidden');
  (banner.querySelector('.banner-text') as HTMLElement).textContent = message;
}

export function hideFatal(root: HTMLElement): void {
  root.querySelector('[data-role="fatal-banner"]')!.classList.add('hidden');
}
