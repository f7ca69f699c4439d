import { mountDesigner } from "./ui.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
const designer = mountDesigner(root, "http://127.0.0.1:8765");
void designer.refreshTemplates().then((ids) => {
  const first = ids[0];
  if (first) void designer.loadTemplate(first);
});
