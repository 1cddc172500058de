// Hash routes; task ids ride in the URL so every result page deep-links.

export type Route =
  | { page: 'entrance' }
  | { page: 'faq' | 'clusters' | 'search' | 'dashboard'; taskId: string };

const RESULT_PAGES = new Set(['faq', 'clusters', 'search', 'dashboard']);

export function parseHash(hash: string): Route {
  const parts = hash.replace(/^#\/?/, '').split('/').filter(Boolean);
  const page = parts[0];
  const taskId = parts[1];
  if (page && taskId && RESULT_PAGES.has(page)) {
    return { page: page as 'faq' | 'clusters' | 'search' | 'dashboard', taskId };
  }
  return { page: 'entrance' };
}

export function href(route: Route): string {
  if (route.page === 'entrance') return '#/';
  return `#/${route.page}/${encodeURIComponent(route.taskId)}`;
}
