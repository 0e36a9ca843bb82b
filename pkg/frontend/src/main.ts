/** Browser bootstrap: snapshot, patch stream, render loop. */

import { ApiClient } from "./api";
import { NotebookView } from "./render";
import { NotebookViewModel } from "./viewmodel";
import { EventStream } from "./ws";

export async function start(root: HTMLElement): Promise<NotebookViewModel> {
  const vm = new NotebookViewModel(new ApiClient(""));
  const view = new NotebookView(vm, root);
  view.mount();

  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const stream = new EventStream(
    `${scheme}://${location.host}/api/events`,
    (patch) => void vm.applyPatch(patch),
    (connected) => {
      vm.setConnected(connected);
      if (connected) void vm.sync(); // reconnects re-sync from a snapshot
    },
  );
  stream.connect();
  await vm.sync();
  return vm;
}

declare global {
  interface Window {
    scratchbook?: { start: typeof start };
  }
}

if (typeof window !== "undefined") {
  window.scratchbook = { start };
  const root = document.getElementById("app");
  if (root) void start(root);
}
