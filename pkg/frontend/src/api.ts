// Typed client for the tutoring service. Every method maps to exactly
// one HTTP request; no cube math happens on this side of the wire.

export type ActiveTask = { kind: string; task_id: string } | null;

export type Snapshot = {
  session_id: string;
  student_id: string;
  state: string;
  context: string;
  active_task: ActiveTask;
  goal: string;
  goal_reached: boolean;
  hint?: Hint;
  walkthrough?: WalkthroughBody;
};

export type Hint = {
  move: string | null;
  text: string;
};

export type WalkthroughStep = {
  index: number;
  move: string;
  explanation: string;
  subgoal_id: number | null;
  pre_state: string;
  post_state: string;
};

export type WalkthroughBody = {
  cursor: number;
  length: number;
  steps: WalkthroughStep[];
};

export type MirrorBody = {
  faces: { down: string; back: string; left: string };
  facelets: string;
};

export type Scenario = {
  id: number;
  title: string;
  start_state: string;
  goal: string;
  max_moves: number;
};

export type StudentLog = {
  student_id: string;
  events: string[];
};

type Action =
  | { action: 'move'; move: string }
  | { action: 'reset' }
  | { action: 'start_task'; task_kind: 'practice' | 'challenge'; task_id: string }
  | { action: 'complete_task' }
  | { action: 'hint' }
  | { action: 'walkthrough_forward' }
  | { action: 'walkthrough_rewind' };

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class TutorClient {
  constructor(readonly baseUrl: string) {}

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    }).then((r) => asJson<T>(r));
  }

  private get<T>(path: string): Promise<T> {
    return fetch(this.baseUrl + path).then((r) => asJson<T>(r));
  }

  createSession(studentId: string): Promise<Snapshot> {
    return this.post('/sessions', { student_id: studentId });
  }

  getSession(sessionId: string): Promise<Snapshot> {
    return this.get(`/sessions/${sessionId}`);
  }

  act(sessionId: string, action: Action): Promise<Snapshot> {
    return this.post(`/sessions/${sessionId}/actions`, action);
  }

  getMirror(sessionId: string): Promise<MirrorBody> {
    return this.get(`/sessions/${sessionId}/mirror`);
  }

  getWalkthrough(sessionId: string): Promise<WalkthroughBody> {
    return this.get(`/sessions/${sessionId}/walkthrough`);
  }

  getScenarios(): Promise<Scenario[]> {
    return this.get('/scenarios');
  }

  getLog(studentId: string): Promise<StudentLog> {
    return this.get(`/logs/${studentId}`);
  }
}
