import init, { describeParams, hilbertDims, pointScheme } from "./pkg/sklyanin_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const ab = () => [$("alpha").value, $("beta").value];

function guard(out, f) {
  try {
    f();
    out.classList.remove("bad");
  } catch (e) {
    out.textContent = String(e);
    out.classList.add("bad");
  }
}

function showParams() {
  guard($("params-out"), () => {
    const p = JSON.parse(describeParams(...ab()));
    $("params-out").textContent =
      `γ = ${p.gamma}\nμ = ${p.mu}\nν = ${p.nu}\nλ = ${p.lambda}\n` +
      `scalars: ℚ(${p.tower.join(", ")}), dimension ${p.tower_dim}`;
  });
}

function showHilbert() {
  guard($("hilbert-out"), () => {
    const dims = JSON.parse(hilbertDims(...ab(), $("which").value, Number($("degree").value)));
    $("hilbert-out").textContent = dims.map((d, n) => `n = ${n}: ${d}`).join("\n");
  });
}

function cell(row, text, tag = "td") {
  const c = document.createElement(tag);
  c.textContent = text;
  row.appendChild(c);
}

function showPoints() {
  const table = $("points-out");
  guard($("points-summary"), () => {
    const s = JSON.parse(pointScheme(...ab()));
    table.replaceChildren();
    const head = table.insertRow();
    for (const h of ["family", "u", "θ(u)", "rank M(u)", "kernel = θ(u)", "κ"]) cell(head, h, "th");
    for (const p of s.points) {
      const r = table.insertRow();
      cell(r, p.family);
      cell(r, `(${p.point.join(" : ")})`);
      cell(r, `(${p.theta.join(" : ")})`);
      cell(r, p.rank);
      cell(r, p.kernel_is_theta ? "yes" : "no");
      cell(r, p.kappa);
    }
    $("points-summary").textContent =
      `${s.passed ? "All checks pass" : "Some checks FAIL"}; ` +
      `${s.random_rank_four}/${s.random_points} random points have rank 4.`;
  });
}

await init();
$("params").addEventListener("click", showParams);
$("hilbert").addEventListener("click", showHilbert);
$("points").addEventListener("click", showPoints);
showParams();
