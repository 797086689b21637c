import "./style.css";
import { boundExcursion } from "./buffers";
import { PhasePlane, SeriesChart } from "./charts";
import { Session } from "./session";
import type { MotionEntry, MotionsResponse } from "./types";

// Point the dashboard at a service on another host with ?server=host:port.
const params = new URLSearchParams(location.search);
const serverHost = params.get("server") ?? location.host;
const secure = location.protocol === "https:";
const httpBase = `${secure ? "https" : "http"}://${serverHost}`;
const wsUrl = `${secure ? "wss" : "ws"}://${serverHost}/ws`;

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

async function main(): Promise<void> {
  const res = await fetch(`${httpBase}/motions`);
  if (!res.ok) throw new Error(`GET /motions failed: ${res.status}`);
  const manifest: MotionsResponse = await res.json();
  const limits = manifest.limits;
  const n = limits.y_min.length;
  const byId = new Map<string, MotionEntry>(
    manifest.motions.map((m) => [m.id, m]),
  );

  const status = el<HTMLSpanElement>("status");
  const readout = el<HTMLSpanElement>("readout");
  const motionSelect = el<HTMLSelectElement>("motionSelect");
  const periodInput = el<HTMLInputElement>("periodInput");
  const gammaSlider = el<HTMLInputElement>("gammaSlider");
  const gammaValue = el<HTMLSpanElement>("gammaValue");
  const pauseButton = el<HTMLButtonElement>("pauseButton");
  const ackList = el<HTMLUListElement>("ackList");

  for (const m of manifest.motions) {
    const opt = document.createElement("option");
    opt.value = m.id;
    opt.textContent =
      m.classification === "strict" ? m.id : `${m.id} (${m.classification})`;
    motionSelect.append(opt);
  }
  motionSelect.addEventListener("change", () => {
    const entry = byId.get(motionSelect.value);
    if (entry) periodInput.value = String(entry.period);
  });

  const planesHost = el<HTMLDivElement>("planes");
  const planes: PhasePlane[] = [];
  for (let i = 0; i < n; i++) {
    const canvas = document.createElement("canvas");
    planesHost.append(canvas);
    planes.push(new PhasePlane(canvas, i, limits));
  }
  const series = new SeriesChart(el<HTMLCanvasElement>("series"), limits);

  const session = new Session(wsUrl);
  session.connect();

  el<HTMLButtonElement>("applyButton").addEventListener("click", () => {
    const period = Number(periodInput.value);
    session.send({
      type: "set_motion",
      id: motionSelect.value,
      ...(Number.isFinite(period) && period > 0 ? { period } : {}),
    });
  });

  gammaSlider.addEventListener("input", () => {
    gammaValue.textContent = Number(gammaSlider.value).toFixed(1);
  });
  gammaSlider.addEventListener("change", () => {
    session.send({ type: "set_gamma", value: Number(gammaSlider.value) });
  });

  let paused = false;
  pauseButton.addEventListener("click", () => {
    const seq = session.send({ type: paused ? "resume" : "pause" });
    if (seq !== null) {
      paused = !paused;
      pauseButton.textContent = paused ? "resume" : "pause";
    }
  });

  el<HTMLButtonElement>("resetButton").addEventListener("click", () => {
    session.send({ type: "reset" });
  });

  let logDirty = true;
  session.onchange = () => {
    logDirty = true;
  };

  const renderLog = (): void => {
    ackList.replaceChildren(
      ...session.ackLog
        .slice()
        .reverse()
        .map((entry) => {
          const li = document.createElement("li");
          li.className = entry.status;
          li.textContent =
            `#${entry.seq} ${entry.label}` +
            (entry.reason ? `: ${entry.reason}` : "");
          return li;
        }),
    );
  };

  let controlsSeeded = false;
  const frame = (): void => {
    const last = session.last;

    status.textContent = session.state;
    status.className = `pill ${session.state}`;

    if (last) {
      if (!controlsSeeded) {
        // Seed the controls from the first snapshot instead of guessing.
        motionSelect.value = last.motion;
        periodInput.value = String(last.period);
        gammaSlider.value = String(last.gamma);
        gammaValue.textContent = last.gamma.toFixed(1);
        controlsSeeded = true;
      }
      const margin = -boundExcursion(session.buffers, limits);
      readout.textContent =
        `t=${last.t.toFixed(1)}s  motion=${last.motion}  T=${last.period}` +
        `  gamma=${last.gamma}  dphi=${last.dphi.toFixed(3)}` +
        `  v3=${last.v3.toExponential(1)}  bound margin=${margin.toFixed(3)}`;

      const entry = byId.get(last.motion);
      if (entry) {
        const key = `${last.motion}@${last.period}`;
        for (const plane of planes) {
          plane.setCurve(entry.components[plane.joint], last.period, key);
          plane.render(session.buffers, last, entry.components[plane.joint]);
        }
      }
      series.render(session.buffers);
    }

    if (logDirty) {
      renderLog();
      logDirty = false;
    }
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

main().catch((err) => {
  document.body.innerHTML = `<pre style="color:#c3564e;padding:20px">${String(err)}</pre>`;
});
