// Typed client for the salesminer HTTP API. The UI never recomputes
// pipeline results; everything rendered comes from these payloads.

export type TaskKind = 'faq_extraction' | 'objection_mining' | 'dashboard';
export type TaskStatus = 'pending' | 'running' | 'succeeded' | 'failed';

export interface ChatlogStats {
  dialogs: number;
  utterances: number;
  speakers: { customer: number; sales: number };
  distinct_staff: number;
  distinct_teams: number;
}

export interface UploadResponse {
  file_id: string;
  stats: ChatlogStats;
}

export interface TaskRecord {
  task_id: string;
  kind: TaskKind;
  file_id: string;
  status: TaskStatus;
  error_message: string;
  created_at: string;
  finished_at: string;
  result_ref: string;
  config_snapshot: Record<string, unknown>;
}

export interface QAPair {
  question: string;
  answer: string;
  score: number;
  dialog_id: string;
  question_index: number;
  answer_index: number;
}

export interface FaqResult {
  kind: 'faq_extraction';
  parameters: Record<string, unknown>;
  pairs: QAPair[];
}

export interface SalesResponseDoc {
  dialog_id: string;
  turn_index: number;
  text: string;
}

export interface ClusterMemberDoc {
  dialog_id: string;
  turn_index: number;
  text: string;
  anchor_relevance: number;
  responses: SalesResponseDoc[];
}

export interface ClusterDoc {
  cluster_id: number;
  anchor_text: string;
  frequency: number;
  mean_relevance: number;
  keywords: string[];
  members: ClusterMemberDoc[];
}

export interface MiningResult {
  kind: 'objection_mining';
  parameters: Record<string, unknown>;
  clusters: ClusterDoc[];
}

export interface DashboardRowDoc {
  key: string;
  triggered: number;
  executed: number;
  ratio: number;
}

export interface ExecutionDoc {
  rule_id: string;
  dialog_id: string;
  trigger_index: number;
  executed: boolean;
  spotlight_index: number | null;
  staff_id: string;
  team_id: string;
}

export type DashboardView = 'trigger' | 'team' | 'staff';

export interface DashboardResult {
  kind: 'dashboard';
  parameters: Record<string, unknown>;
  executions: ExecutionDoc[];
  views: Record<DashboardView, DashboardRowDoc[]>;
}

export interface SearchHitDoc {
  entry_id: number;
  response_text: string;
  customer_query_text: string;
  cluster_id: number;
  score: number;
}

export interface SearchResponse {
  query: string;
  k: number;
  task: string;
  hits: SearchHitDoc[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

/** Base URL; same-origin by default, overridable for a detached backend. */
function apiBase(): string {
  const override = (globalThis as Record<string, unknown>)['SALESMINER_API'];
  return typeof override === 'string' ? override.replace(/\/$/, '') : '';
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(apiBase() + path, init);
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    body = null;
  }
  if (!response.ok) {
    const err = (body as { error?: { kind?: string; message?: string } } | null)?.error;
    throw new ApiError(
      response.status,
      err?.kind ?? `HTTP${response.status}`,
      err?.message ?? `request failed with status ${response.status}`,
    );
  }
  return body as T;
}

export function uploadChatlog(file: File): Promise<UploadResponse> {
  const form = new FormData();
  form.append('file', file, file.name);
  return request<UploadResponse>('/api/chatlogs', { method: 'POST', body: form });
}

export function startTask(
  kind: TaskKind,
  fileId: string,
  overrides?: Record<string, unknown>,
): Promise<{ task_id: string }> {
  const body: Record<string, unknown> = { kind, file_id: fileId };
  if (overrides) body['overrides'] = overrides;
  return request<{ task_id: string }>('/api/tasks', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(body),
  });
}

export async function listTasks(): Promise<TaskRecord[]> {
  const doc = await request<{ tasks: TaskRecord[] }>('/api/tasks');
  return doc.tasks;
}

export function getTask(taskId: string): Promise<TaskRecord> {
  return request<TaskRecord>(`/api/tasks/${encodeURIComponent(taskId)}`);
}

export function getResult<T>(taskId: string): Promise<T> {
  return request<T>(`/api/tasks/${encodeURIComponent(taskId)}/result`);
}

export function searchResponses(
  taskId: string,
  query: string,
  k: number,
): Promise<SearchResponse> {
  const params = new URLSearchParams({ q: query, k: String(k), task: taskId });
  return request<SearchResponse>(`/api/search?${params.toString()}`);
}

export function describeError(err: unknown): string {
  if (err instanceof ApiError) return `${err.kind}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
