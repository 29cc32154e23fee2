import init, { dim4_orbit, compare_triples, triple_stabilizer } from "./pkg/mubeq_web.js";

// Accepts plain numbers and sums such as "1+pi/2" or "3*pi/4".
function angle(id) {
  const text = document.getElementById(id).value.trim();
  if (!/^[0-9+\-*/. pi()]+$/.test(text)) return NaN;
  const expr = text.replace(/pi/g, "Math.PI");
  return Number(Function(`"use strict"; return (${expr});`)());
}

function show(id, json) {
  document.getElementById(id).textContent = JSON.stringify(JSON.parse(json), null, 2);
}

function wire(button, run) {
  document.getElementById(button).addEventListener("click", run);
  run();
}

await init();

wire("orbit-run", () => show("orbit-out", dim4_orbit(angle("orbit-y"), angle("orbit-z"))));
wire("cmp-run", () =>
  show("cmp-out", compare_triples(angle("cmp-y1"), angle("cmp-z1"), angle("cmp-y2"), angle("cmp-z2"))));
wire("stab-run", () => show("stab-out", triple_stabilizer(angle("stab-y"), angle("stab-z"))));
