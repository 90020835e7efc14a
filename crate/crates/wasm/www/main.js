import init, { bridge_report, rr_table, kneser_mod } from "./pkg/fflab_wasm.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  out.classList.remove("bad");
  try {
    const text = f();
    out.textContent = text;
    return JSON.parse(text);
  } catch (e) {
    out.classList.add("bad");
    out.textContent = String(e.message ?? e);
    return null;
  }
}

function renderTable(report) {
  const host = $("rr-table");
  host.replaceChildren();
  if (!report) return;
  const table = document.createElement("table");
  const head = table.insertRow();
  for (const h of ["n", "dim", "rule", "expected", "ok"]) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const row of report.table) {
    const tr = table.insertRow();
    for (const key of ["n", "dim", "rule", "expected", "ok"]) {
      tr.insertCell().textContent = String(row[key]);
    }
    if (!row.ok) tr.classList.add("bad");
  }
  host.appendChild(table);
}

await init();

$("bridge-run").onclick = () =>
  show($("bridge-out"), () => bridge_report($("bridge-set").value, Number($("bridge-char").value)));

$("rr-run").onclick = () => {
  const r = show($("rr-out"), () =>
    rr_table(Number($("rr-genus").value), Number($("rr-n").value), Number($("rr-char").value), $("rr-curve").value));
  renderTable(r);
};

$("kn-run").onclick = () =>
  show($("kn-out"), () => kneser_mod($("kn-set").value, Number($("kn-mod").value)));

for (const id of ["bridge-run", "rr-run", "kn-run"]) $(id).click();
