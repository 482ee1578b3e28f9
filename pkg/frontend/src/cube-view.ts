// Unfolded-net rendering. A state string is 54 color characters in
// U, L, F, R, B, D block order, each block row-major facing the face.

export const COLOR_HEX: Record<string, string> = {
  W: '#f5f5f5',
  Y: '#ffd500',
  G: '#009b48',
  B: '#0046ad',
  O: '#ff5800',
  R: '#b71234',
  X: '#8a8a8a',
};

// Net layout: U above F; L F R B across the middle; D below F.
const FACE_ORIGINS: [row: number, col: number][] = [
  [0, 3], // U
  [3, 0], // L
  [3, 3], // F
  [3, 6], // R
  [3, 9], // B
  [6, 3], // D
];

export function renderNet(el: HTMLElement, state: string): void {
  el.textContent = '';
  el.classList.add('net');
  for (let i = 0; i < 54; i++) {
    const [r0, c0] = FACE_ORIGINS[Math.floor(i / 9)];
    const offset = i % 9;
    const cell = document.createElement('div');
    cell.className = 'cell';
    cell.dataset.index = String(i);
    cell.dataset.color = state[i];
    cell.style.gridRow = String(r0 + Math.floor(offset / 3) + 1);
    cell.style.gridColumn = String(c0 + (offset % 3) + 1);
    cell.style.background = COLOR_HEX[state[i]] ?? '#000';
    el.appendChild(cell);
  }
}

export function readNet(el: HTMLElement): string {
  const cells = Array.from(el.querySelectorAll<HTMLElement>('.cell'));
  cells.sort((a, b) => Number(a.dataset.index) - Number(b.dataset.index));
  return cells.map((c) => c.dataset.color ?? 'X').join('');
}

export function renderFace(el: HTMLElement, name: string, facelets: string): void {
  const wrap = document.createElement('div');
  wrap.className = 'mirror-face';
  const label = document.createElement('span');
  label.className = 'mirror-label';
  label.textContent = name;
  const grid = document.createElement('div');
  grid.className = 'face-grid';
  for (let i = 0; i < 9; i++) {
    const cell = document.createElement('div');
    cell.className = 'cell';
    cell.dataset.color = facelets[i];
    cell.style.background = COLOR_HEX[facelets[i]] ?? '#000';
    grid.appendChild(cell);
  }
  wrap.append(label, grid);
  el.appendChild(wrap);
}

// A goal pattern uses X for unconstrained cells; the net shows them dim.
export function matchesPattern(state: string, pattern: string): boolean {
  for (let i = 0; i < 54; i++) {
    if (pattern[i] !== 'X' && pattern[i] !== state[i]) return false;
  }
  return true;
}
