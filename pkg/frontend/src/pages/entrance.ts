// Entrance page: chatlog upload, task kind selection/start, and a task
// list that polls every two seconds. Finished tasks link to their result
// pages; API errors render inline next to the control that caused them.

import {
  describeError,
  listTasks,
  startTask,
  uploadChatlog,
  type TaskKind,
  type TaskRecord,
} from '../api.js';
import { clear, el } from '../dom.js';
import { L } from '../labels.js';
import { href } from '../router.js';
import { LatestWins } from '../seq.js';

export const POLL_INTERVAL_MS = 2000;

const KINDS: TaskKind[] = ['faq_extraction', 'objection_mining', 'dashboard'];

function resultLinks(task: TaskRecord): Array<Node | string> {
  if (task.status === 'failed') {
    return [el('span', { class: 'error', text: task.error_message })];
  }
  if (task.status !== 'succeeded') return [''];
  const id = task.task_id;
  switch (task.kind) {
    case 'faq_extraction':
      return [el('a', { href: href({ page: 'faq', taskId: id }), text: L.openFaq })];
    case 'objection_mining':
      return [
        el('a', { href: href({ page: 'clusters', taskId: id }), text: L.openClusters }),
        ' ',
        el('a', { href: href({ page: 'search', taskId: id }), text: L.openSearch }),
      ];
    case 'dashboard':
      return [el('a', { href: href({ page: 'dashboard', taskId: id }), text: L.openDashboard })];
  }
}

export function renderEntrance(root: HTMLElement): () => void {
  let fileId: string | null = null;

  const fileInput = el('input', { type: 'file', accept: '.csv,text/csv' });
  const uploadButton = el('button', { type: 'button', text: L.uploadButton });
  const uploadStatus = el('p', { class: 'hint' });

  const kindSelect = el('select', {}, KINDS.map((kind) =>
    el('option', { value: kind, text: L.taskKinds[kind] }),
  ));
  const startButton = el('button', { type: 'button', text: L.startButton, disabled: '' });
  const startStatus = el('p', { class: 'hint' });

  const tbody = el('tbody');
  const listError = el('p', { class: 'error hidden' });

  root.append(
    el('section', {}, [
      el('h2', { text: L.uploadHeading }),
      el('div', {}, [fileInput, ' ', uploadButton]),
      uploadStatus,
    ]),
    el('section', {}, [
      el('h2', { text: L.startHeading }),
      el('div', {}, [kindSelect, ' ', startButton]),
      startStatus,
    ]),
    el('section', {}, [
      el('h2', { text: L.tasksHeading }),
      el('table', {}, [
        el('thead', {}, [
          el('tr', {}, [
            el('th', { text: L.colTask }),
            el('th', { text: L.colKind }),
            el('th', { text: L.colStatus }),
            el('th', { text: L.colCreated }),
            el('th', { text: L.colResult }),
          ]),
        ]),
        tbody,
      ]),
      listError,
    ]),
  );

  function renderRows(tasks: TaskRecord[]): void {
    clear(tbody);
    if (tasks.length === 0) {
      tbody.append(el('tr', {}, [el('td', { colspan: '5', text: L.noTasks })]));
      return;
    }
    for (const task of tasks) {
      tbody.append(
        el('tr', { 'data-task-id': task.task_id }, [
          el('td', { class: 'task-id', text: task.task_id }),
          el('td', { text: L.taskKinds[task.kind] ?? task.kind }),
          el('td', {}, [
            el('span', {
              class: `status status-${task.status}`,
              text: L.statuses[task.status] ?? task.status,
            }),
          ]),
          el('td', { text: task.created_at }),
          el('td', {}, resultLinks(task)),
        ]),
      );
    }
  }

  const guard = new LatestWins();

  async function refresh(): Promise<void> {
    const token = guard.begin();
    try {
      const tasks = await listTasks();
      if (!guard.isCurrent(token)) return; // a newer poll already landed
      listError.classList.add('hidden');
      renderRows(tasks);
    } catch (err) {
      if (!guard.isCurrent(token)) return;
      listError.textContent = describeError(err);
      listError.classList.remove('hidden');
    }
  }

  uploadButton.addEventListener('click', async () => {
    const file = fileInput.files?.[0];
    uploadStatus.className = 'hint';
    if (!file) {
      uploadStatus.textContent = L.chooseFile;
      return;
    }
    try {
      const doc = await uploadChatlog(file);
      fileId = doc.file_id;
      startButton.disabled = false;
      uploadStatus.textContent = L.statsLine(
        doc.stats.dialogs,
        doc.stats.utterances,
        doc.file_id,
      );
    } catch (err) {
      uploadStatus.className = 'error';
      uploadStatus.textContent = describeError(err);
    }
  });

  startButton.addEventListener('click', async () => {
    if (fileId === null) return;
    startStatus.className = 'hint';
    try {
      const doc = await startTask(kindSelect.value as TaskKind, fileId);
      startStatus.textContent = L.taskStarted(doc.task_id);
      void refresh();
    } catch (err) {
      startStatus.className = 'error';
      startStatus.textContent = describeError(err);
    }
  });

  void refresh();
  const timer = setInterval(() => void refresh(), POLL_INTERVAL_MS);
  return () => clearInterval(timer);
}
