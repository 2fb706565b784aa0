// Built by `wasm-pack build crates/web --target web --out-dir www/pkg`.
import init, { invariants, compare, expansion } from "./pkg/ckflow_web.js";

const $ = (id) => document.getElementById(id);

function show(id, json) {
  const value = JSON.parse(json);
  $(id).textContent = JSON.stringify(value, null, 2);
  return value;
}

function renderMatrix(rows) {
  return rows.map((r) => r.join(" ")).join("\n");
}

await init();

$("inv-run").addEventListener("click", () => {
  show("inv-out", invariants($("inv-matrix").value));
});

$("cmp-run").addEventListener("click", () => {
  const v = show("cmp-out", compare($("cmp-a").value, $("cmp-b").value));
  const verdict = $("cmp-verdict");
  if (v.error) {
    verdict.textContent = "";
    return;
  }
  verdict.textContent = v.equivalent ? "flow equivalent" : "not flow equivalent";
  verdict.className = v.equivalent ? "yes" : "no";
});

$("exp-run").addEventListener("click", () => {
  const out = JSON.parse(expansion($("exp-matrix").value, Number($("exp-vertex").value)));
  if (out.error) {
    $("exp-out").textContent = out.error;
    return;
  }
  const lines = [
    renderMatrix(out.expanded),
    "",
    `before: BF = ${out.before.bowen_franks}, det = ${out.before.det}`,
    `after:  BF = ${out.after.bowen_franks}, det = ${out.after.det}`,
    "",
    ...out.identities.map((c) => `${c.holds ? "ok  " : "FAIL"} ${c.name}`),
  ];
  $("exp-out").textContent = lines.join("\n");
});
