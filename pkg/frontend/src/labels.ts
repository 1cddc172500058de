// Every user-facing string lives here so the UI can be localized by
// swapping this one module.

import type { TaskKind, TaskStatus } from './api.js';

export const L = {
  appTitle: 'Sales Miner',
  backToTasks: '← Tasks',

  uploadHeading: 'Upload a chatlog',
  uploadButton: 'Upload',
  chooseFile: 'Choose a chatlog CSV first.',
  statsLine: (dialogs: number, utterances: number, fileId: string): string =>
    `${dialogs} dialogs, ${utterances} utterances — file ${fileId.slice(0, 12)}…`,

  startHeading: 'Start a task',
  startButton: 'Start task',
  taskStarted: (taskId: string): string => `Task ${taskId} started.`,
  taskKinds: {
    faq_extraction: 'FAQ extraction',
    objection_mining: 'Objection mining',
    dashboard: 'SOP dashboard',
  } satisfies Record<TaskKind, string>,

  tasksHeading: 'Tasks',
  noTasks: 'No tasks yet.',
  colTask: 'Task',
  colKind: 'Kind',
  colStatus: 'Status',
  colCreated: 'Created',
  colResult: 'Result',
  statuses: {
    pending: 'Pending',
    running: 'Running',
    succeeded: 'Succeeded',
    failed: 'Failed',
  } satisfies Record<TaskStatus, string>,
  openFaq: 'FAQ',
  openClusters: 'Clusters',
  openSearch: 'Search',
  openDashboard: 'Dashboard',

  faqHeading: 'Extracted FAQ',
  colQuestion: 'Question',
  colAnswer: 'Answer',
  colScore: 'Score',
  noFaqs: 'No FAQs.',

  clustersHeading: 'Objection clusters',
  colAnchor: 'Representative objection',
  colFrequency: 'Frequency',
  colRelevance: 'Mean relevance',
  colKeywords: 'Keywords',
  noClusters: 'No clusters.',
  popupResponsesHint: 'Sales responses, grouped by the customer message they answered:',
  noResponses: 'No recorded responses.',
  close: 'Close',

  searchHeading: 'Search sales responses',
  searchPlaceholder: 'Describe the customer objection…',
  searchButton: 'Search',
  colHit: '#',
  colResponse: 'Sales response',
  colCustomerQuery: 'Customer query',
  colCluster: 'Cluster',
  noHits: 'No matches.',

  dashboardHeading: 'SOP compliance',
  tabs: {
    trigger: 'Trigger view',
    team: 'Team view',
    staff: 'Staff view',
  },
  colKey: 'Key',
  colTriggered: 'Triggered',
  colExecuted: 'Executed',
  colRatio: 'Execution ratio',

  loading: 'Loading…',
};
