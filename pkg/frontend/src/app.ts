// Three-panel session client: scenarios left, cube center, guidance
// right. The server snapshot is authoritative; every gesture sends
// exactly one action request, and failures land in the chat pane.

import { ApiError, Scenario, Snapshot, TutorClient, WalkthroughBody } from './api.js';
import { renderFace, renderNet } from './cube-view.js';

export type ViewState = {
  sessionId: string;
  cube: string;
  goal: string;
  mirrorVisible: boolean;
  activeScenario: string | null;
  walkthroughCursor: number;
  transcript: string[];
};

export type App = {
  client: TutorClient;
  view: ViewState;
  settled: () => Promise<void>;
};

const MOVE_TOKENS = ['U', "U'", 'L', "L'", 'F', "F'", 'R', "R'", 'B', "B'", 'D', "D'"];

const PAGE = `
  <div class="panel" id="panel-scenarios">
    <h2>Scenarios</h2>
    <ul id="scenario-list"></ul>
    <h2>Challenges</h2>
    <div id="challenge-list"></div>
  </div>
  <div class="panel" id="panel-cube">
    <div id="status"></div>
    <div id="net"></div>
    <div id="move-buttons"></div>
    <div class="row">
      <button id="reset">Reset</button>
      <button id="complete">Complete task</button>
      <button id="mirror-toggle">Mirror</button>
    </div>
    <div id="mirror" hidden></div>
  </div>
  <div class="panel" id="panel-chat">
    <h2>Coach</h2>
    <div id="transcript"></div>
    <div class="row">
      <button id="hint">Hint</button>
      <button id="wt-plan">Plan</button>
      <button id="wt-rewind">&#8592; Step</button>
      <button id="wt-forward">Step &#8594;</button>
    </div>
    <div id="wt-caption"></div>
    <div id="wt-preview"></div>
  </div>
`;

export async function createApp(
  root: HTMLElement,
  baseUrl: string,
  studentId: string,
): Promise<App> {
  const client = new TutorClient(baseUrl);
  root.innerHTML = PAGE;

  const byId = <T extends HTMLElement>(id: string) =>
    root.querySelector<T>(`#${id}`)!;
  const net = byId<HTMLDivElement>('net');
  const status = byId<HTMLDivElement>('status');
  const transcriptEl = byId<HTMLDivElement>('transcript');
  const mirrorEl = byId<HTMLDivElement>('mirror');
  const previewEl = byId<HTMLDivElement>('wt-preview');
  const captionEl = byId<HTMLDivElement>('wt-caption');
  const forwardBtn = byId<HTMLButtonElement>('wt-forward');
  const rewindBtn = byId<HTMLButtonElement>('wt-rewind');

  const snapshot = await client.createSession(studentId);
  const view: ViewState = {
    sessionId: snapshot.session_id,
    cube: snapshot.state,
    goal: snapshot.goal,
    mirrorVisible: false,
    activeScenario: null,
    walkthroughCursor: 0,
    transcript: [],
  };
  let inflight: Promise<void> = Promise.resolve();
  let busy = false;

  function say(text: string, kind: 'guidance' | 'error'): void {
    view.transcript.push(text);
    const bubble = document.createElement('div');
    bubble.className = `bubble ${kind}`;
    bubble.textContent = text;
    transcriptEl.appendChild(bubble);
  }

  function applySnapshot(snap: Snapshot): void {
    view.cube = snap.state;
    view.goal = snap.goal;
    view.activeScenario = snap.active_task
      ? `${snap.active_task.kind} ${snap.active_task.task_id}`
      : null;
    renderNet(net, snap.state);
    const task = view.activeScenario ?? 'free play';
    const goal = snap.goal_reached ? 'goal reached' : 'goal open';
    status.textContent = `${task} | ${goal}`;
  }

  function applyWalkthrough(body: WalkthroughBody): void {
    view.walkthroughCursor = body.cursor;
    const at =
      body.length === 0
        ? view.cube
        : body.cursor === 0
          ? body.steps[0].pre_state
          : body.steps[body.cursor - 1].post_state;
    renderNet(previewEl, at);
    captionEl.textContent =
      body.cursor < body.length
        ? `Step ${body.cursor + 1} of ${body.length}: ${body.steps[body.cursor].explanation}`
        : body.length === 0
          ? 'Nothing to do.'
          : 'End of walkthrough.';
    forwardBtn.disabled = body.cursor >= body.length;
    rewindBtn.disabled = body.cursor <= 0;
  }

  async function refreshMirror(): Promise<void> {
    const body = await client.getMirror(view.sessionId);
    mirrorEl.textContent = '';
    mirrorEl.dataset.facelets = body.facelets;
    renderFace(mirrorEl, 'down', body.faces.down);
    renderFace(mirrorEl, 'back', body.faces.back);
    renderFace(mirrorEl, 'left', body.faces.left);
  }

  function dispatch(work: () => Promise<void>): void {
    if (busy) return; // one in-flight mutation at a time
    busy = true;
    inflight = work()
      .catch((err) => {
        if (err instanceof ApiError) say(err.detail, 'error');
        else say(String(err), 'error');
        renderNet(net, view.cube); // roll back to the last good snapshot
      })
      .finally(() => {
        busy = false;
      });
  }

  function mutate(run: () => Promise<Snapshot>, after?: (snap: Snapshot) => void): void {
    dispatch(async () => {
      const snap = await run();
      applySnapshot(snap);
      after?.(snap);
      if (view.mirrorVisible) await refreshMirror();
    });
  }

  const moveButtons = byId<HTMLDivElement>('move-buttons');
  for (const token of MOVE_TOKENS) {
    const btn = document.createElement('button');
    btn.className = 'move';
    btn.dataset.move = token;
    btn.textContent = token;
    btn.addEventListener('click', () =>
      mutate(() => client.act(view.sessionId, { action: 'move', move: token })),
    );
    moveButtons.appendChild(btn);
  }

  byId<HTMLButtonElement>('reset').addEventListener('click', () =>
    mutate(() => client.act(view.sessionId, { action: 'reset' })),
  );

  byId<HTMLButtonElement>('complete').addEventListener('click', () =>
    mutate(() => client.act(view.sessionId, { action: 'complete_task' })),
  );

  byId<HTMLButtonElement>('hint').addEventListener('click', () =>
    mutate(
      () => client.act(view.sessionId, { action: 'hint' }),
      (snap) => {
        if (snap.hint) say(snap.hint.text, 'guidance');
      },
    ),
  );

  byId<HTMLButtonElement>('wt-plan').addEventListener('click', () =>
    dispatch(async () => {
      applyWalkthrough(await client.getWalkthrough(view.sessionId));
    }),
  );

  forwardBtn.addEventListener('click', () =>
    mutate(
      () => client.act(view.sessionId, { action: 'walkthrough_forward' }),
      (snap) => {
        if (snap.walkthrough) {
          applyWalkthrough(snap.walkthrough);
          say(snap.walkthrough.steps[snap.walkthrough.cursor - 1].explanation, 'guidance');
        }
      },
    ),
  );

  rewindBtn.addEventListener('click', () =>
    mutate(
      () => client.act(view.sessionId, { action: 'walkthrough_rewind' }),
      (snap) => {
        if (snap.walkthrough) applyWalkthrough(snap.walkthrough);
      },
    ),
  );

  byId<HTMLButtonElement>('mirror-toggle').addEventListener('click', () =>
    dispatch(async () => {
      view.mirrorVisible = !view.mirrorVisible;
      mirrorEl.hidden = !view.mirrorVisible;
      if (view.mirrorVisible) await refreshMirror();
    }),
  );

  const scenarios: Scenario[] = await client.getScenarios();
  const list = byId<HTMLUListElement>('scenario-list');
  for (const scenario of scenarios) {
    const item = document.createElement('li');
    const btn = document.createElement('button');
    btn.className = 'scenario';
    btn.dataset.scenarioId = String(scenario.id);
    btn.textContent = `${scenario.title} (${scenario.max_moves} moves)`;
    btn.addEventListener('click', () =>
      mutate(() =>
        client.act(view.sessionId, {
          action: 'start_task',
          task_kind: 'practice',
          task_id: String(scenario.id),
        }),
      ),
    );
    item.appendChild(btn);
    list.appendChild(item);
  }

  const challenges = byId<HTMLDivElement>('challenge-list');
  for (const id of ['c1', 'c2']) {
    const btn = document.createElement('button');
    btn.className = 'challenge';
    btn.dataset.challengeId = id;
    btn.textContent = `Challenge ${id}`;
    btn.addEventListener('click', () =>
      mutate(() =>
        client.act(view.sessionId, {
          action: 'start_task',
          task_kind: 'challenge',
          task_id: id,
        }),
      ),
    );
    challenges.appendChild(btn);
  }

  applySnapshot(snapshot);

  return {
    client,
    view,
    settled: () => inflight,
  };
}
