import init, { moment, marriages, find_recurrence } from "./pkg/mvnm_wasm.js";

const $ = (id) => document.getElementById(id);

function show(el, json, render) {
  const v = JSON.parse(json);
  if (v.error) {
    el.textContent = "error: " + v.error;
  } else {
    render(v);
  }
}

await init();

$("mgo").onclick = () => {
  const t0 = performance.now();
  const out = moment(+$("mk").value, $("mm").value, $("mc").value, $("me").value);
  const ms = (performance.now() - t0).toFixed(1);
  show($("mout"), out, (v) => {
    const meta = JSON.stringify(v.metadata);
    $("mout").textContent = `${v.text}\n\n${v.engine}, ${ms} ms, ${meta}`;
  });
};

$("wgo").onclick = () => {
  show($("wout"), marriages(+$("w1").value, +$("w2").value), (v) => {
    const rows = v.rows.map((r) => `<tr><td>${r.r}</td><td>${r.count}</td></tr>`).join("");
    $("wout").innerHTML = rows
      ? `<table><tr><th>mixed pairs</th><th>pairings</th></tr>${rows}</table>`
      : "<p>No complete pairing exists (odd total).</p>";
  });
};

$("rgo").onclick = () => {
  const out = find_recurrence(+$("rk").value, +$("rd").value, $("rf").value, $("rc").value);
  show($("rout"), out, (v) => {
    $("rout").textContent =
      `order ${v.order}, degree ${v.degree}, step ${v.step}, offset ${v.offset}\n\n` +
      JSON.stringify(v.recurrence, null, 2);
  });
};
