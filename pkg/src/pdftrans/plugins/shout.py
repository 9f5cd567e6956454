"""Minimal translator plugin: upper-cases the text.

Load it with ``pdftrans translate doc.pdf --plugin pdftrans.plugins.shout
--service shout`` or ``load_plugin("pdftrans.plugins.shout")``. Placeholder
scalars have no case, so they pass through untouched.
"""
from __future__ import annotations

from pdftrans.translators import BaseTranslator, ServiceDescriptor


class ShoutTranslator(BaseTranslator):
    descriptor = ServiceDescriptor("shout", "test", identity_class=True, description="upper-cases text")

    def do_translate(self, req):
        return req.text.upper()


def register(registry):
    if "shout" not in registry:
        registry.register(ShoutTranslator.descriptor, ShoutTranslator)
