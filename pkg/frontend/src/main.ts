// Entry point: ?campaign=<id>&evaluator=<token> selects the session.

import { ApiClient, ApiError } from "./api.js";
import { EvalSession } from "./session.js";
import { renderApp, renderError } from "./ui.js";

export async function boot(root: HTMLElement, baseUrl: string, search: string): Promise<EvalSession | null> {
  const params = new URLSearchParams(search);
  const campaign = params.get("campaign");
  const evaluator = params.get("evaluator");
  if (!campaign || !evaluator) {
    renderError(root, "Missing ?campaign= and ?evaluator= parameters.");
    return null;
  }
  const session = new EvalSession(new ApiClient(baseUrl), campaign, evaluator, window.localStorage);
  try {
    await session.load();
  } catch (err) {
    if (err instanceof ApiError && (err.status === 403 || err.status === 404)) {
      renderError(root, "This evaluator link is not valid for the campaign. Check your token.");
    } else {
      renderError(root, `Could not load your assignment: ${(err as Error).message}`);
    }
    return null;
  }
  renderApp(root, session);
  return session;
}

declare global {
  interface Window {
    __listeningUiBooted?: Promise<EvalSession | null>;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.__listeningUiBooted = boot(
    document.getElementById("app") as HTMLElement,
    window.location.origin,
    window.location.search,
  );
}
