// Shared test utilities.

import type { FetchLike } from "../src/api.js";

/** Let pending promise chains settle (real timers only). */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

/**
 * Hold PUT requests at a barrier so tests can observe the optimistic
 * render while a command is in flight, then release the response.
 */
export function gatedPut(inner: FetchLike): {
  fetch: FetchLike;
  open: () => void;
} {
  let release: (() => void) | undefined;
  const barrier = new Promise<void>((resolve) => {
    release = resolve;
  });
  const fetch: FetchLike = async (input, init) => {
    if ((init?.method ?? "GET").toUpperCase() === "PUT") await barrier;
    return inner(input, init);
  };
  return { fetch, open: () => release?.() };
}

/** Hold GET requests matching a path fragment behind a barrier. */
export function gatedGet(
  inner: FetchLike,
  pathFragment: string,
): { fetch: FetchLike; open: () => void } {
  let release: (() => void) | undefined;
  const barrier = new Promise<void>((resolve) => {
    release = resolve;
  });
  const fetch: FetchLike = async (input, init) => {
    const method = (init?.method ?? "GET").toUpperCase();
    if (method === "GET" && input.includes(pathFragment)) await barrier;
    return inner(input, init);
  };
  return { fetch, open: () => release?.() };
}
