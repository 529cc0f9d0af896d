// DOM wiring for the explorer page.  All game legality lives in
// board.ts and all paint decisions in view.ts; this file only binds
// clicks and renders view models.

import * as board from "./board.js";
import { requestValues } from "./api.js";
import { UiPosition, initialPosition, applyClick, acceptValues, networkFailure, ClickTarget } from "./state.js";
import { buildView } from "./view.js";

const params = new URLSearchParams(window.location.search);
const SERVER = params.get("server") ?? `http://${window.location.hostname}:2048`;

let state: UiPosition = initialPosition(
  params.get("board") ? board.parseBoard(params.get("board")!) : 0n,
);
let fetchSeq = 0;

const boardEl = document.getElementById("board")!;
const rotationsEl = document.getElementById("rotations")!;
const bannerEl = document.getElementById("banner")!;
const keyEl = document.getElementById("key")!;
const undoEl = document.getElementById("undo")!;

function dispatch(target: ClickTarget): void {
  const result = applyClick(state, target);
  if (!result.changed) {
    if (result.rejected) flashBanner(result.rejected);
    return;
  }
  state = result.state;
  render();
  fetchValues();
}

function fetchValues(): void {
  if (board.terminalValue(state.board) !== null) return;
  if (state.values !== null) return;
  const seq = ++fetchSeq;
  const wanted = state.board;
  state = { ...state, fetching: true };
  requestValues(SERVER, wanted)
    .then((resp) => {
      if (seq !== fetchSeq) return; // superseded request
      state = acceptValues(state, resp);
      render();
    })
    .catch((err) => {
      if (seq !== fetchSeq) return;
      state = networkFailure(state, String(err));
      render();
    });
  render();
}

function flashBanner(message: string): void {
  bannerEl.textContent = message;
  bannerEl.classList.add("flash");
  setTimeout(() => bannerEl.classList.remove("flash"), 600);
}

function render(): void {
  const view = buildView(state);
  bannerEl.textContent = view.banner;
  bannerEl.className = view.statusClass;
  keyEl.textContent = `board ${state.board}`;
  boardEl.replaceChildren();
  for (const cv of view.cells) {
    const el = document.createElement("div");
    el.className = "cell";
    // row-major top to bottom: y=5 first
    el.style.gridRow = String(6 - cv.y);
    el.style.gridColumn = String(cv.x + 1);
    if (cv.x === 2) el.classList.add("qright");
    if (cv.y === 3) el.classList.add("qbottom");
    if (cv.stone) {
      const stone = document.createElement("div");
      stone.className = cv.stone === 1 ? "stone black" : "stone white";
      el.appendChild(stone);
    } else if (cv.pending) {
      const stone = document.createElement("div");
      stone.className = "stone pending";
      el.appendChild(stone);
    } else if (cv.marker) {
      const marker = document.createElement("div");
      marker.className = `marker ${cv.marker}`;
      el.appendChild(marker);
    }
    if (cv.clickable) {
      el.classList.add("clickable");
      el.addEventListener("click", () => dispatch({ kind: "cell", cell: { x: cv.x, y: cv.y } }));
    }
    boardEl.appendChild(el);
  }
  rotationsEl.replaceChildren();
  for (const rv of view.rotations) {
    const el = document.createElement("button");
    el.className = "rot";
    el.textContent = `Q${rv.quad} ${rv.direction === 1 ? "↺" : "↻"}`;
    if (rv.marker) el.classList.add(rv.marker);
    el.disabled = !rv.clickable;
    el.addEventListener("click", () =>
      dispatch({ kind: "rotation", quad: rv.quad, direction: rv.direction }),
    );
    rotationsEl.appendChild(el);
  }
}

undoEl.addEventListener("click", () => dispatch({ kind: "undo" }));
render();
fetchValues();
