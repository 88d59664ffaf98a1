# App package marker
