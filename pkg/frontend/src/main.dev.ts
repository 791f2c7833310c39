// Dev build entry: identical app plus the developer inbox panel.
import { bootstrap } from "./app.js";

bootstrap(document.getElementById("app") as HTMLElement, { devPanel: true });
