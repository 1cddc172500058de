import { vi } from 'vitest';

export function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export type FetchHandler = (
  url: string,
  init?: RequestInit,
) => Response | Promise<Response>;

/** Replace global fetch with a handler; returns the spy for call assertions. */
export function stubFetch(handler: FetchHandler) {
  const spy = vi.fn((input: RequestInfo | URL, init?: RequestInit) =>
    Promise.resolve(handler(String(input), init)),
  );
  vi.stubGlobal('fetch', spy);
  return spy;
}

/** Fresh mount point for a page render. */
export function mount(): HTMLElement {
  document.body.innerHTML = '<main id="app"></main>';
  return document.getElementById('app') as HTMLElement;
}

/** Let pending promise chains settle (real timers). */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
