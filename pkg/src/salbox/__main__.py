from salbox.cli import entrypoint

entrypoint()
