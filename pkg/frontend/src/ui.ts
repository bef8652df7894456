// DOM rendering: one clip at a time with its transcript, a play-through-gated
// audio element, the rubric score rows (descriptors expandable under each),
// and a progress bar.

import type { RubricCategory } from "./api.js";
import { EvalSession } from "./session.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderProgress(session: EvalSession): HTMLElement {
  const wrap = el("div", "progress-wrap");
  const label = el(
    "div",
    "progress-label",
    `clip ${Math.min(session.completedClips + 1, session.totalClips)} of ${session.totalClips}`,
  );
  const bar = el("div", "progress");
  const fill = el("div", "progress-fill");
  fill.style.width = `${Math.round(session.progressFraction * 100)}%`;
  fill.dataset.fraction = session.progressFraction.toFixed(4);
  bar.appendChild(fill);
  wrap.append(label, bar);
  return wrap;
}

function renderCategory(
  session: EvalSession,
  category: RubricCategory,
  onChange: () => void,
): HTMLElement {
  const fieldset = el("fieldset", "category");
  fieldset.dataset.code = category.code;
  fieldset.appendChild(el("legend", "category-name", `${category.name} (${category.code})`));

  const row = el("div", "score-row");
  for (let score = 5; score >= 1; score--) {
    const label = el("label", "score-choice");
    const input = el("input") as HTMLInputElement;
    input.type = "radio";
    input.name = `score-${category.code}`;
    input.value = String(score);
    if (session.drafts[category.code] === score) input.checked = true;
    input.addEventListener("change", () => {
      session.setScore(category.code, score);
      onChange();
    });
    label.append(input, document.createTextNode(String(score)));
    row.appendChild(label);
  }
  fieldset.appendChild(row);

  const help = el("details", "descriptors");
  help.appendChild(el("summary", undefined, "score guide"));
  const list = el("dl");
  for (let score = 5; score >= 1; score--) {
    list.appendChild(el("dt", undefined, `(${score})`));
    const dd = el("dd", "descriptor-text", category.descriptors[String(score)]);
    dd.dataset.code = category.code;
    dd.dataset.score = String(score);
    list.appendChild(dd);
  }
  help.appendChild(list);
  fieldset.appendChild(help);
  return fieldset;
}

export function renderApp(root: HTMLElement, session: EvalSession): void {
  root.textContent = "";
  const app = el("div", "app");
  app.appendChild(el("h1", undefined, "Listening test"));
  app.appendChild(renderProgress(session));

  const clip = session.currentClip;
  if (!clip) {
    const done = el("div", "done");
    done.appendChild(el("p", "done-message", "All clips rated. Thank you!"));
    app.appendChild(done);
    root.appendChild(app);
    return;
  }

  const card = el("section", "clip-card");
  card.dataset.clipId = clip.clip_id;

  const transcript = el("blockquote", "transcript", clip.transcript);
  card.appendChild(transcript);

  const audio = el("audio") as HTMLAudioElement;
  audio.controls = true;
  audio.src = session.api.url(clip.audio_url);
  audio.preload = "auto";
  let lastTime = 0;
  audio.addEventListener("timeupdate", () => {
    lastTime = audio.currentTime;
  });
  // no scrubbing until the clip has been heard once, re-listens unrestricted
  audio.addEventListener("seeking", () => {
    if (!session.hasPlayedThrough(clip.clip_id) && Math.abs(audio.currentTime - lastTime) > 0.25) {
      audio.currentTime = lastTime;
    }
  });
  audio.addEventListener("ended", () => {
    session.markPlayedThrough(clip.clip_id);
    refresh();
  });
  card.appendChild(audio);

  const gateNote = el("p", "gate-note", "Play the clip to the end to enable submission.");
  card.appendChild(gateNote);

  const form = el("form", "rating-form");
  form.addEventListener("submit", (ev) => ev.preventDefault());
  const refresh = () => {
    const blocker = session.blocker();
    submit.disabled = blocker !== null;
    gateNote.hidden = session.hasPlayedThrough(clip.clip_id);
    validation.textContent = "";
  };
  for (const category of session.assignment!.rubric) {
    form.appendChild(renderCategory(session, category, refresh));
  }
  card.appendChild(form);

  const validation = el("p", "validation");
  validation.setAttribute("role", "alert");
  card.appendChild(validation);

  const submit = el("button", "submit", "Submit ratings") as HTMLButtonElement;
  submit.type = "button";
  submit.addEventListener("click", async () => {
    const blocker = session.blocker();
    if (blocker) {
      validation.textContent = blocker;
      return;
    }
    submit.disabled = true;
    try {
      await session.submitCurrent();
      renderApp(root, session); // next clip (or done screen)
    } catch (err) {
      // drafts stay in storage; surface the error and allow retry
      validation.textContent = `submission failed, please retry (${(err as Error).message})`;
      submit.disabled = false;
    }
  });
  card.appendChild(submit);

  app.appendChild(card);
  root.appendChild(app);
  refresh();
}

export function renderError(root: HTMLElement, message: string): void {
  root.textContent = "";
  const box = el("div", "error-screen");
  box.appendChild(el("h1", undefined, "Listening test"));
  box.appendChild(el("p", "error-message", message));
  root.appendChild(box);
}
