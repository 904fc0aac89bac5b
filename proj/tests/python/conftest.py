import hashlib
import json
import os
import pathlib

import pytest

FIXTURES = pathlib.Path(os.environ.get("UARADAR_FIXTURE_DIR", pathlib.Path(__file__).parents[1] / "fixtures"))

PAGE = """<!DOCTYPE html>
<html><head><title>News</title></head>
<body><header><h1>Daily news</h1></header>
<main><article><h2 class="headline">Weather</h2><p>Sunny all week.</p>
<img src="/img/1.jpg" width="80" height="40"></article>
<aside><p>Subscribe for more.</p><button class="sub">Subscribe</button></aside></main>
<footer><p>{footer}</p></footer>
</body></html>
"""

CSS = "body { margin: 0; }\n.headline { margin-top: 8px; }\n"
JS = "function render(x){return document.title+x;}\n"

ENGINES = {"C": ("chromium", "standard"), "CN": ("chromium", "none"),
           "F": ("firefox", "standard"), "FN": ("firefox", "none")}


def write_visit(root, label, phase, visit, html, css=CSS, js=JS, url="https://site.test/"):
    """Snapshot directory laid out per the manifest schema."""
    root = pathlib.Path(root)
    (root / "resources").mkdir(parents=True, exist_ok=True)
    resources = []

    def add(kind, rel, data, res_url):
        (root / rel).write_bytes(data)
        resources.append({"url": res_url, "kind": kind, "path": rel,
                          "digest": hashlib.sha256(data).hexdigest(), "byte_len": len(data)})

    add("document", "page.html", html.encode(), url)
    for kind, ext, body, name in (("script", "js", js, "app.js"), ("stylesheet", "css", css, "site.css")):
        data = body.encode()
        add(kind, f"resources/{hashlib.sha256(data).hexdigest()}.{ext}", data, url + "static/" + name)
    manifest = {"page_url": url, "engine_id": ENGINES[label][0], "ua_mode": ENGINES[label][1], "label": label,
                "phase": phase, "visit_index": visit, "captured_at": f"2026-01-01T00:00:0{visit}Z",
                "resources": resources}
    if phase == "post_js":
        shot = (FIXTURES / "images" / "page.png").read_bytes()
        add("screenshot", "screenshot.png", shot, url + "#screenshot")
        manifest["viewport"] = {"width": 384, "height": 191}
        manifest["full_page"] = True
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return root


@pytest.fixture
def visits(tmp_path):
    def make(label, phase="post_js", footer="Contact us", css=CSS):
        dirs = []
        for v in (1, 2):
            html = PAGE.format(footer=footer).replace("</footer>", f"<p>Updated 10:0{v}</p></footer>")
            dirs.append(write_visit(tmp_path / f"{label}-{phase}-{v}", label, phase, v, html, css=css))
        return dirs
    return make

