// Browser bootstrap: load the committed graph, render it, follow the
// event stream, and wire the what-if form.

import { ApiClient } from "./api";
import { EventFollower } from "./events";
import { GraphRenderer } from "./render";
import { bannerText, ConsoleGraphView } from "./view";
import { submitWhatIf, type WhatIfDraft } from "./whatif";
import "./style.css";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

async function bootstrap(): Promise<void> {
  const api = new ApiClient("");
  const view = new ConsoleGraphView();
  const renderer = new GraphRenderer(el("graph"), (id) => {
    view.select(view.selection === id ? null : id);
    redraw();
  });

  const banner = el("banner");
  const status = el("status");
  const notice = el("whatif-notice");

  function redraw(): void {
    renderer.render(view);
    banner.textContent = view.banner ?? "";
    banner.className = view.banner ? "banner active" : "banner";
    if (view.schemaMismatch) {
      banner.textContent = "schema version mismatch — update the console";
      banner.className = "banner error";
    }
    status.textContent = view.export_
      ? `version ${view.committedVersion} · digest ${view.committedDigest?.slice(0, 12)}`
      : "loading…";
  }

  view.applyExport(await api.graph());
  redraw();

  const follower = new EventFollower(api, view, {
    onTransition: () => redraw(),
    onStatus: (state) => {
      status.classList.toggle("reconnecting", state === "reconnecting");
    },
  });
  follower.start();

  el<HTMLFormElement>("whatif-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const draft: WhatIfDraft = {
      target_address: el<HTMLInputElement>("wi-address").value,
      target_port: el<HTMLInputElement>("wi-port").value,
      protocol: el<HTMLInputElement>("wi-protocol").value,
      cve_ref: el<HTMLInputElement>("wi-cve").value,
    };
    submitWhatIf(api, draft)
      .then((overlay) => {
        view.setOverlay(overlay);
        notice.textContent =
          overlay.notice ?? `hypothetical: ${bannerText(overlay.classification) ?? "no path change"}`;
        redraw();
      })
      .catch((error: Error) => {
        notice.textContent = error.message;
      });
  });

  el("whatif-clear").addEventListener("click", () => {
    view.clearOverlay();
    notice.textContent = "";
    redraw();
  });
}

void bootstrap();
