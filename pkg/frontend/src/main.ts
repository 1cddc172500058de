// App shell: routes the hash to a page renderer and tears down the
// previous page (stopping its polling) on navigation.

import { clear } from './dom.js';
import { L } from './labels.js';
import { parseHash, type Route } from './router.js';
import { renderClusters } from './pages/clusters.js';
import { renderDashboard } from './pages/dashboard.js';
import { renderEntrance } from './pages/entrance.js';
import { renderFaq } from './pages/faq.js';
import { renderSearch } from './pages/search.js';

let cleanup: (() => void) | null = null;

async function render(root: HTMLElement, route: Route): Promise<void> {
  cleanup?.();
  cleanup = null;
  clear(root);
  switch (route.page) {
    case 'entrance':
      cleanup = renderEntrance(root);
      break;
    case 'faq':
      await renderFaq(root, route.taskId);
      break;
    case 'clusters':
      await renderClusters(root, route.taskId);
      break;
    case 'search':
      renderSearch(root, route.taskId);
      break;
    case 'dashboard':
      await renderDashboard(root, route.taskId);
      break;
  }
}

export function boot(): void {
  const title = document.getElementById('app-title');
  if (title) title.textContent = L.appTitle;
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app mount point');
  const rerender = (): void => {
    void render(root, parseHash(window.location.hash));
  };
  window.addEventListener('hashchange', rerender);
  rerender();
}

boot();
